#include "omidet/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace omidet {

namespace {

std::string num(Scalar v) { return nlohmann::json(v).dump(); }

}  // namespace

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw std::invalid_argument("confusion: size mismatch");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if ((y_true[i] != 0 && y_true[i] != 1) ||
            (y_pred[i] != 0 && y_pred[i] != 1)) {
            throw std::invalid_argument("confusion: labels must be 0 or 1");
        }
        if (y_true[i] == 1) {
            (y_pred[i] == 1 ? cm.tp : cm.fn)++;
        } else {
            (y_pred[i] == 1 ? cm.fp : cm.tn)++;
        }
    }
    return cm;
}

Scalar class_f1(const ConfusionMatrix& cm, int cls) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    if (cls == 1) {
        tp = cm.tp;
        fp = cm.fp;
        fn = cm.fn;
    } else if (cls == 0) {
        // Class 0 one-vs-rest: its true positives are the negatives the
        // model got right, and the error roles swap.
        tp = cm.tn;
        fp = cm.fn;
        fn = cm.fp;
    } else {
        throw std::invalid_argument("class_f1: class must be 0 or 1");
    }
    const std::int64_t denom = 2 * tp + fp + fn;
    if (denom == 0) return 0;
    return Scalar(2 * tp) / Scalar(denom);
}

MetricsReport compute_metrics(const std::vector<int>& y_true,
                              const std::vector<Scalar>& y_hat,
                              Scalar threshold, const std::string& split) {
    if (y_true.empty()) {
        throw std::invalid_argument("compute_metrics: empty split");
    }
    if (y_true.size() != y_hat.size()) {
        throw std::invalid_argument("compute_metrics: size mismatch");
    }
    std::vector<int> y_pred(y_hat.size());
    for (std::size_t i = 0; i < y_hat.size(); ++i) {
        if (!std::isfinite(y_hat[i])) {
            throw std::invalid_argument("compute_metrics: non-finite score at " +
                                        std::to_string(i));
        }
        y_pred[i] = y_hat[i] >= threshold ? 1 : 0;
    }
    MetricsReport r;
    r.split = split;
    r.n = static_cast<std::int64_t>(y_true.size());
    r.cm = confusion(y_true, y_pred);
    r.accuracy = Scalar(r.cm.tp + r.cm.tn) / Scalar(r.cm.total());
    r.f1_real = class_f1(r.cm, 0);
    r.f1_fake = class_f1(r.cm, 1);
    r.macro_f1 = (r.f1_real + r.f1_fake) / 2;
    return r;
}

MetricsReport compute_metrics(const std::vector<PredictionRecord>& records,
                              Scalar threshold, const std::string& split) {
    std::vector<int> y_true;
    std::vector<Scalar> y_hat;
    y_true.reserve(records.size());
    y_hat.reserve(records.size());
    for (const auto& rec : records) {
        y_true.push_back(rec.y);
        y_hat.push_back(rec.y_hat);
    }
    return compute_metrics(y_true, y_hat, threshold, split);
}

std::string MetricsReport::to_json() const {
    nlohmann::json j;
    j["split"] = split;
    j["n"] = n;
    j["accuracy"] = accuracy;
    j["f1_real"] = f1_real;
    j["f1_fake"] = f1_fake;
    j["macro_f1"] = macro_f1;
    j["confusion"] = {{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
    return j.dump(2);
}

MetricsReport MetricsReport::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MetricsReport r;
    r.split = j.at("split").get<std::string>();
    r.n = j.at("n").get<std::int64_t>();
    r.accuracy = j.at("accuracy").get<Scalar>();
    r.f1_real = j.at("f1_real").get<Scalar>();
    r.f1_fake = j.at("f1_fake").get<Scalar>();
    r.macro_f1 = j.at("macro_f1").get<Scalar>();
    const auto& c = j.at("confusion");
    r.cm.tp = c.at("tp").get<std::int64_t>();
    r.cm.fp = c.at("fp").get<std::int64_t>();
    r.cm.fn = c.at("fn").get<std::int64_t>();
    r.cm.tn = c.at("tn").get<std::int64_t>();
    return r;
}

std::string MetricsReport::csv_header() {
    return "split,n,accuracy,f1_real,f1_fake,macro_f1,tp,fp,fn,tn";
}

std::string MetricsReport::csv_row() const {
    std::ostringstream out;
    out << split << ',' << n << ',' << num(accuracy) << ',' << num(f1_real)
        << ',' << num(f1_fake) << ',' << num(macro_f1) << ',' << cm.tp << ','
        << cm.fp << ',' << cm.fn << ',' << cm.tn;
    return out.str();
}

MetricSummary summarize(const std::vector<Scalar>& values) {
    if (values.empty()) {
        throw std::invalid_argument("summarize: no values");
    }
    MetricSummary s;
    for (Scalar v : values) s.mean += v;
    s.mean /= static_cast<Scalar>(values.size());
    if (values.size() >= 2) {
        Scalar acc = 0;
        for (Scalar v : values) acc += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(acc / static_cast<Scalar>(values.size() - 1));
    }
    return s;
}

AggregateReport aggregate_metrics(const std::vector<MetricsReport>& runs) {
    if (runs.empty()) {
        throw std::invalid_argument("aggregate_metrics: no runs");
    }
    AggregateReport a;
    a.runs = runs;
    std::vector<Scalar> acc, fr, ff, mf;
    for (const auto& r : runs) {
        acc.push_back(r.accuracy);
        fr.push_back(r.f1_real);
        ff.push_back(r.f1_fake);
        mf.push_back(r.macro_f1);
    }
    a.accuracy = summarize(acc);
    a.f1_real = summarize(fr);
    a.f1_fake = summarize(ff);
    a.macro_f1 = summarize(mf);
    return a;
}

std::string AggregateReport::to_json() const {
    nlohmann::json j;
    auto put = [&](const char* key, const MetricSummary& s) {
        j[key] = {{"mean", s.mean}, {"std", s.stddev}};
    };
    put("accuracy", accuracy);
    put("f1_real", f1_real);
    put("f1_fake", f1_fake);
    put("macro_f1", macro_f1);
    j["runs"] = nlohmann::json::array();
    for (const auto& r : runs) {
        j["runs"].push_back(nlohmann::json::parse(r.to_json()));
    }
    return j.dump(2);
}

AggregateReport AggregateReport::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<MetricsReport> runs;
    for (const auto& r : j.at("runs")) {
        runs.push_back(MetricsReport::from_json(r.dump()));
    }
    return aggregate_metrics(runs);
}

std::string AggregateReport::csv_header() {
    return "label,runs,accuracy_mean,accuracy_std,f1_real_mean,f1_real_std,"
           "f1_fake_mean,f1_fake_std,macro_f1_mean,macro_f1_std";
}

std::string AggregateReport::csv_row(const std::string& label) const {
    std::ostringstream out;
    out << label << ',' << runs.size() << ',' << num(accuracy.mean) << ','
        << num(accuracy.stddev) << ',' << num(f1_real.mean) << ','
        << num(f1_real.stddev) << ',' << num(f1_fake.mean) << ','
        << num(f1_fake.stddev) << ',' << num(macro_f1.mean) << ','
        << num(macro_f1.stddev);
    return out.str();
}

}  // namespace omidet
