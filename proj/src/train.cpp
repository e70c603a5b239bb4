#include "omidet/train.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace omidet {

namespace {

void check_dataset(const Dataset& data) {
    if (data.train.empty()) {
        throw std::invalid_argument("train: empty training split");
    }
    if (data.val.empty()) {
        throw std::invalid_argument("train: empty validation split");
    }
}

}  // namespace

std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(order[i - 1], order[j]);
    }
    return order;
}

std::vector<Mat> snapshot_params(const ParamStore& store) {
    std::vector<Mat> snap;
    snap.reserve(store.count());
    for (const auto& p : store.all()) snap.push_back(p->value);
    return snap;
}

void restore_params(ParamStore& store, const std::vector<Mat>& snapshot) {
    if (snapshot.size() != store.count()) {
        throw std::invalid_argument("restore_params: snapshot size mismatch");
    }
    auto& params = store.all();
    for (std::size_t i = 0; i < snapshot.size(); ++i) {
        if (snapshot[i].rows() != params[i]->value.rows() ||
            snapshot[i].cols() != params[i]->value.cols()) {
            throw std::invalid_argument("restore_params: shape mismatch at " +
                                        params[i]->name);
        }
        params[i]->value = snapshot[i];
    }
}

TrainResult train_model(OmissionModel& model, const Dataset& data,
                        const TrainConfig& cfg) {
    check_dataset(data);
    if (cfg.batch_size <= 0 || cfg.max_epochs <= 0 || cfg.patience <= 0) {
        throw std::invalid_argument("train: config values must be positive");
    }

    Rng rng(cfg.seed);
    AdamWConfig opt_cfg;
    opt_cfg.lr = cfg.learning_rate;
    opt_cfg.weight_decay = cfg.weight_decay;
    AdamW opt(opt_cfg);

    ParamStore& store = model.params();
    TrainResult result;
    std::vector<Mat> best = snapshot_params(store);
    int stale_epochs = 0;

    const std::size_t n = data.train.size();
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const std::vector<std::size_t> order = shuffled_order(n, rng);
        Scalar loss_sum = 0;
        std::size_t pos = 0;
        while (pos < n) {
            const std::size_t end =
                std::min(n, pos + static_cast<std::size_t>(cfg.batch_size));
            store.zero_grads();
            for (std::size_t k = pos; k < end; ++k) {
                const Example& ex = data.train[order[k]];
                Tape t;
                const auto f = model.forward(t, ex.graph, ex.item_embedding);
                const Tape::Id loss = model.loss(t, f, ex.label);
                const Scalar lv = t.scalar_value(loss);
                if (!std::isfinite(lv)) {
                    throw std::runtime_error(
                        "train: non-finite loss at epoch " +
                        std::to_string(epoch) + ", item " + ex.item_id);
                }
                loss_sum += lv;
                t.backward(loss);
            }
            const Scalar inv = Scalar(1) / static_cast<Scalar>(end - pos);
            for (auto& p : store.all()) p->grad *= inv;
            if (!store.grads_finite()) {
                throw std::runtime_error("train: non-finite gradient at epoch " +
                                         std::to_string(epoch));
            }
            opt.step(store);
            pos = end;
        }

        const MetricsReport val = evaluate_model(model, data.val, "val");
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = loss_sum / static_cast<Scalar>(n);
        rec.val_macro_f1 = val.macro_f1;
        rec.val_accuracy = val.accuracy;
        result.history.push_back(rec);

        if (val.macro_f1 > result.best_val_macro_f1) {
            result.best_val_macro_f1 = val.macro_f1;
            result.best_epoch = epoch;
            best = snapshot_params(store);
            stale_epochs = 0;
        } else if (++stale_epochs >= cfg.patience) {
            result.early_stopped = true;
            break;
        }
    }

    restore_params(store, best);
    return result;
}

std::vector<PredictionRecord> predict_split(const OmissionModel& model,
                                            const std::vector<Example>& split) {
    std::vector<PredictionRecord> records;
    records.reserve(split.size());
    for (const Example& ex : split) {
        Tape t;
        const auto f = model.forward(t, ex.graph, ex.item_embedding);
        PredictionRecord rec;
        rec.item_id = ex.item_id;
        rec.y_hat = t.scalar_value(f.y_hat);
        rec.y = ex.label;
        rec.mode = fusion_mode_name(model.config().fusion);
        if (model.config().fusion == FusionMode::Prediction) {
            rec.base_score = f.base_score;
        }
        records.push_back(rec);
    }
    return records;
}

MetricsReport evaluate_model(const OmissionModel& model,
                             const std::vector<Example>& split,
                             const std::string& split_name) {
    return compute_metrics(predict_split(model, split), 0.5, split_name);
}

TrainResult train_probe(BaseProbe& probe, const Dataset& data,
                        const TrainConfig& cfg) {
    check_dataset(data);
    Rng rng(cfg.seed);
    AdamWConfig opt_cfg;
    opt_cfg.lr = cfg.learning_rate;
    opt_cfg.weight_decay = cfg.weight_decay;
    AdamW opt(opt_cfg);

    std::vector<Vec> xs;
    std::vector<int> ys;
    for (const Example& ex : data.train) {
        xs.push_back(ex.item_embedding);
        ys.push_back(ex.label);
    }

    TrainResult result;
    std::vector<Mat> best = snapshot_params(probe.params());
    int stale_epochs = 0;

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto order = shuffled_order(xs.size(), rng);
        const Scalar train_loss =
            probe.train_epoch(xs, ys, order, cfg.batch_size, opt);
        if (!std::isfinite(train_loss)) {
            throw std::runtime_error("train_probe: non-finite loss at epoch " +
                                     std::to_string(epoch));
        }
        const MetricsReport val = evaluate_probe(probe, data.val, "val");
        EpochRecord rec;
        rec.epoch = epoch;
        rec.train_loss = train_loss;
        rec.val_macro_f1 = val.macro_f1;
        rec.val_accuracy = val.accuracy;
        result.history.push_back(rec);

        if (val.macro_f1 > result.best_val_macro_f1) {
            result.best_val_macro_f1 = val.macro_f1;
            result.best_epoch = epoch;
            best = snapshot_params(probe.params());
            stale_epochs = 0;
        } else if (++stale_epochs >= cfg.patience) {
            result.early_stopped = true;
            break;
        }
    }

    restore_params(probe.params(), best);
    return result;
}

MetricsReport evaluate_probe(const BaseProbe& probe,
                             const std::vector<Example>& split,
                             const std::string& split_name) {
    if (split.empty()) {
        throw std::invalid_argument("evaluate_probe: empty split");
    }
    std::vector<int> y_true;
    std::vector<Scalar> y_hat;
    for (const Example& ex : split) {
        y_true.push_back(ex.label);
        y_hat.push_back(probe.score(ex.item_embedding));
    }
    return compute_metrics(y_true, y_hat, 0.5, split_name);
}

std::string TrainResult::to_json() const {
    nlohmann::json j;
    j["best_epoch"] = best_epoch;
    j["best_val_macro_f1"] = best_val_macro_f1;
    j["early_stopped"] = early_stopped;
    j["history"] = nlohmann::json::array();
    for (const auto& rec : history) {
        j["history"].push_back({{"epoch", rec.epoch},
                                {"train_loss", rec.train_loss},
                                {"val_macro_f1", rec.val_macro_f1},
                                {"val_accuracy", rec.val_accuracy}});
    }
    return j.dump(2);
}

}  // namespace omidet
