#include "omidet/detector.hpp"

#include <cmath>
#include <stdexcept>

namespace omidet {

std::string fusion_mode_name(FusionMode m) {
    return m == FusionMode::Representation ? "representation" : "prediction";
}

FusionMode fusion_mode_from_name(const std::string& name) {
    if (name == "representation") return FusionMode::Representation;
    if (name == "prediction") return FusionMode::Prediction;
    throw std::invalid_argument("unknown fusion mode '" + name + "'");
}

Vec pool_target(const std::vector<Vec>& node_states, const OmissionGraph& g) {
    if (g.target_node_ids.empty()) {
        throw std::invalid_argument("pool_target: graph has no target nodes");
    }
    Vec sum = Vec::Zero(node_states.at(0).size());
    for (int id : g.target_node_ids) {
        sum += node_states.at(static_cast<std::size_t>(id));
    }
    return sum / static_cast<Scalar>(g.target_node_ids.size());
}

Scalar bce_loss(Scalar y_hat, int y) {
    if (y != 0 && y != 1) {
        throw std::invalid_argument("bce_loss: label must be 0 or 1");
    }
    const Scalar p = clamp_unit(y_hat, 1e-7);
    return (y == 1) ? -std::log(p) : -std::log(Scalar(1) - p);
}

BaseProbe::BaseProbe(int d_enc, std::uint64_t seed) {
    if (d_enc <= 0) {
        throw std::invalid_argument("BaseProbe: d_enc must be positive");
    }
    (void)seed;  // zero init is deterministic; seed kept for interface parity
    w_ = &store_.add_matrix("base.w", 1, d_enc);
    b_ = &store_.add_vector("base.b", 1);
}

Scalar BaseProbe::score(const Vec& item_embedding) const {
    const Scalar z = (w_->value * item_embedding)(0, 0) + b_->value(0, 0);
    return sigmoid(z);
}

Scalar BaseProbe::train_epoch(const std::vector<Vec>& xs,
                              const std::vector<int>& ys,
                              const std::vector<std::size_t>& order,
                              int batch_size, AdamW& opt) {
    if (xs.size() != ys.size() || xs.empty()) {
        throw std::invalid_argument("BaseProbe::train_epoch: bad dataset");
    }
    Scalar total = 0;
    std::size_t pos = 0;
    while (pos < order.size()) {
        const std::size_t end =
            std::min(order.size(), pos + static_cast<std::size_t>(batch_size));
        store_.zero_grads();
        for (std::size_t k = pos; k < end; ++k) {
            const std::size_t i = order[k];
            Tape t;
            const Tape::Id z = t.affine(*w_, b_, t.constant(xs[i]));
            const Tape::Id y_hat = t.sigmoid_(z);
            const Tape::Id loss = t.bce(y_hat, ys[i]);
            total += t.scalar_value(loss);
            t.backward(loss);
        }
        const Scalar inv = Scalar(1) / static_cast<Scalar>(end - pos);
        for (auto& p : store_.all()) p->grad *= inv;
        opt.step(store_);
        pos = end;
    }
    return total / static_cast<Scalar>(order.size());
}

OmissionModel::OmissionModel(const ModelConfig& cfg) : cfg_(cfg) {
    if (cfg_.d_enc <= 0) {
        throw std::invalid_argument("OmissionModel: d_enc must be positive");
    }
    Rng rng(cfg_.seed);
    const int d = cfg_.gnn.d;
    const int d_e = cfg_.gnn.d_e;

    proj_node_w_ = &store_.add_matrix("proj.node_w", d, cfg_.d_enc);
    glorot_init(*proj_node_w_, rng);
    proj_node_b_ = &store_.add_vector("proj.node_b", d);
    proj_intent_w_ = &store_.add_matrix("proj.intent_w", d_e, cfg_.d_enc);
    glorot_init(*proj_intent_w_, rng);
    proj_intent_b_ = &store_.add_vector("proj.intent_b", d_e);

    intra_net_.emplace(store_, "intra",
                       MlpConfig{3 * d, cfg_.gnn.hidden, d_e}, rng);
    gnn_.emplace(store_, cfg_.gnn, rng);

    if (cfg_.fusion == FusionMode::Representation) {
        fusion_net_.emplace(store_, "fusion",
                            MlpConfig{d + cfg_.d_enc, cfg_.gnn.hidden, 1}, rng);
    } else {
        // Zero start: fused decisions match the base detector until the
        // omission head learns something.
        omi_head_w_ = &store_.add_matrix("fusion.omi_w", 1, d);
        omi_head_b_ = &store_.add_vector("fusion.omi_b", 1);
        base_w_ = &store_.add_matrix("fusion.base_w", 1, cfg_.d_enc);
        base_b_ = &store_.add_vector("fusion.base_b", 1);
    }
}

Tape::Id OmissionModel::project_node(Tape& t, const Vec& raw) const {
    if (raw.size() != cfg_.d_enc) {
        throw std::invalid_argument("node embedding has dim " +
                                    std::to_string(raw.size()) + ", expected " +
                                    std::to_string(cfg_.d_enc));
    }
    return t.affine(*proj_node_w_, proj_node_b_, t.constant(raw));
}

Tape::Id OmissionModel::fuse_representation(Tape& t, Tape::Id h_omi,
                                            const Vec& h_com) const {
    if (h_com.size() != cfg_.d_enc) {
        throw std::invalid_argument("fuse: h_com has dim " +
                                    std::to_string(h_com.size()) + ", expected " +
                                    std::to_string(cfg_.d_enc));
    }
    const Tape::Id joint = t.concat({h_omi, t.constant(h_com)});
    return t.sigmoid_(fusion_net_->forward(t, joint));
}

Tape::Id OmissionModel::fuse_prediction(Tape& t, Tape::Id h_omi,
                                        Tape::Id base_logit) const {
    const Tape::Id z_omi = t.affine(*omi_head_w_, omi_head_b_, h_omi);
    const Tape::Id z = t.add(base_logit, z_omi);
    Vec one(1);
    one[0] = 1.0;
    return t.scale(t.add(t.tanh_(z), t.constant(one)), 0.5);
}

OmissionModel::Forward OmissionModel::forward(Tape& t, const OmissionGraph& g,
                                              const Vec& item_embedding,
                                              GnnDiagnostics* diag) const {
    Forward f;

    std::vector<Tape::Id> h0;
    h0.reserve(g.nodes.size());
    for (const auto& node : g.nodes) {
        h0.push_back(project_node(t, node.embedding));
    }

    std::vector<GnnEdgeIn> edges;
    edges.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        GnnEdgeIn in;
        in.src = e.src;
        in.dst = e.dst;
        in.etype = e.etype;
        if (e.etype == EdgeType::Intra) {
            const Tape::Id hi = h0[static_cast<std::size_t>(e.src)];
            const Tape::Id hj = h0[static_cast<std::size_t>(e.dst)];
            in.attr = intra_net_->forward(
                t, t.concat({hi, hj, t.cwise_abs(t.sub(hi, hj))}));
        } else {
            if (e.intent_embedding.size() != cfg_.d_enc) {
                throw std::invalid_argument(
                    "inter edge intent embedding has dim " +
                    std::to_string(e.intent_embedding.size()) + ", expected " +
                    std::to_string(cfg_.d_enc));
            }
            in.attr = t.affine(*proj_intent_w_, proj_intent_b_,
                               t.constant(e.intent_embedding));
        }
        edges.push_back(in);
    }

    f.gnn = gnn_forward(t, *gnn_, h0, edges, diag);

    std::vector<Tape::Id> target_states;
    target_states.reserve(g.target_node_ids.size());
    for (int id : g.target_node_ids) {
        target_states.push_back(f.gnn.node_states.at(static_cast<std::size_t>(id)));
    }
    f.h_omi = t.mean_of(target_states);

    if (cfg_.fusion == FusionMode::Representation) {
        f.y_hat = fuse_representation(t, f.h_omi, item_embedding);
    } else {
        Tape::Id base_logit;
        if (cfg_.joint_base) {
            base_logit = t.affine(*base_w_, base_b_, t.constant(item_embedding));
        } else {
            Vec z(1);
            z[0] = (base_w_->value * item_embedding)(0, 0) + base_b_->value(0, 0);
            base_logit = t.constant(z);
        }
        f.base_score = sigmoid(t.value(base_logit)[0]);
        f.y_hat = fuse_prediction(t, f.h_omi, base_logit);
    }
    return f;
}

Tape::Id OmissionModel::loss(Tape& t, const Forward& f, int label) const {
    return t.bce(f.y_hat, label);
}

Scalar OmissionModel::predict(const OmissionGraph& g,
                              const Vec& item_embedding) const {
    Tape t;
    return t.scalar_value(forward(t, g, item_embedding).y_hat);
}

Vec OmissionModel::intra_edge_attr(const Vec& h_i, const Vec& h_j) const {
    if (h_i.size() != cfg_.gnn.d || h_j.size() != cfg_.gnn.d) {
        throw std::invalid_argument("intra_edge_attr: inputs must have dim " +
                                    std::to_string(cfg_.gnn.d));
    }
    Tape t;
    const Tape::Id a = t.constant(h_i);
    const Tape::Id b = t.constant(h_j);
    const Tape::Id out =
        intra_net_->forward(t, t.concat({a, b, t.cwise_abs(t.sub(a, b))}));
    return t.value(out);
}

Scalar OmissionModel::fuse_and_predict(const Vec& h_omi,
                                       const BaseDetectorOutput& base) const {
    Tape t;
    const Tape::Id h = t.constant(h_omi);
    if (base.kind == FusionMode::Representation) {
        if (cfg_.fusion != FusionMode::Representation) {
            throw std::invalid_argument(
                "fuse_and_predict: model not configured for representation fusion");
        }
        if (!base.h_com) {
            throw std::invalid_argument("fuse_and_predict: base output lacks h_com");
        }
        return t.scalar_value(fuse_representation(t, h, *base.h_com));
    }
    if (cfg_.fusion != FusionMode::Prediction) {
        throw std::invalid_argument(
            "fuse_and_predict: model not configured for prediction fusion");
    }
    if (!base.score) {
        throw std::invalid_argument("fuse_and_predict: base output lacks a score");
    }
    Vec z(1);
    z[0] = logit(*base.score);  // validates (0,1)
    return t.scalar_value(fuse_prediction(t, h, t.constant(z)));
}

void OmissionModel::save(const std::filesystem::path& path,
                         const std::string& config_hash) const {
    save_params(store_, path, config_hash);
}

std::string OmissionModel::load(const std::filesystem::path& path) {
    return load_params(store_, path);
}

}  // namespace omidet
