#include "omidet/gnn.hpp"

#include <cmath>
#include <stdexcept>

namespace omidet {

GnnParams::GnnParams(ParamStore& store, const GnnConfig& cfg_in, Rng& rng)
    : cfg(cfg_in) {
    if (cfg.d <= 0 || cfg.d_e <= 0 || cfg.layers < 1) {
        throw std::invalid_argument("GnnParams: d, d_e and layers must be positive");
    }
    for (int l = 0; l < cfg.layers; ++l) {
        const std::string pfx = "gnn.l" + std::to_string(l);
        layers.push_back(Layer{
            Mlp(store, pfx + ".edge", MlpConfig{cfg.d + cfg.d_e, cfg.hidden, cfg.d},
                rng),
            Mlp(store, pfx + ".msg", MlpConfig{cfg.d + cfg.d, cfg.hidden, cfg.d},
                rng),
            Mlp(store, pfx + ".update", MlpConfig{cfg.d, cfg.hidden, cfg.d}, rng),
        });
    }
    type_intra = &store.add_vector("gnn.type_intra", cfg.d);
    type_inter = &store.add_vector("gnn.type_inter", cfg.d);
    uniform_init(*type_intra, rng, 0.02);
    uniform_init(*type_inter, rng, 0.02);
    gate_w = &store.add_matrix("gnn.gate_w", 1, cfg.d);
    glorot_init(*gate_w, rng);
    gate_b = &store.add_vector("gnn.gate_b", 1);
    psi_w = &store.add_matrix("gnn.psi_w", cfg.d, cfg.d);
    glorot_init(*psi_w, rng);
    psi_b = &store.add_vector("gnn.psi_b", cfg.d);
    root0 = &store.add_vector("gnn.root0", cfg.d);
    uniform_init(*root0, rng, 0.02);
}

namespace {

Tape::Id enhance_edge_node(Tape& t, const GnnParams& p, int layer, EdgeType etype,
                           Tape::Id attr) {
    Param* type_emb =
        etype == EdgeType::Intra ? p.type_intra : p.type_inter;
    const Tape::Id type_id = t.param_vector(*type_emb);
    return p.layers[static_cast<std::size_t>(layer)].edge_net.forward(
        t, t.concat({type_id, attr}));
}

void check_layer(const GnnParams& p, int layer) {
    if (layer < 0 || layer >= static_cast<int>(p.layers.size())) {
        throw std::out_of_range("gnn layer index " + std::to_string(layer) +
                                " out of range");
    }
}

}  // namespace

std::vector<Tape::Id> gnn_local_update(Tape& t, const GnnParams& p, int layer,
                                       const std::vector<Tape::Id>& h_prev,
                                       const std::vector<GnnEdgeIn>& edges,
                                       GnnDiagnostics* diag) {
    check_layer(p, layer);
    const auto& nets = p.layers[static_cast<std::size_t>(layer)];
    const int n = static_cast<int>(h_prev.size());

    // Enhanced attribute per edge, then in-edge lists per destination.
    std::vector<Tape::Id> enhanced(edges.size());
    std::vector<std::vector<int>> in_edges(static_cast<std::size_t>(n));
    for (std::size_t k = 0; k < edges.size(); ++k) {
        const auto& e = edges[k];
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
            throw std::out_of_range("gnn edge endpoint out of range");
        }
        enhanced[k] = enhance_edge_node(t, p, layer, e.etype, e.attr);
        in_edges[static_cast<std::size_t>(e.dst)].push_back(static_cast<int>(k));
    }

    const Scalar logit_scale =
        p.cfg.scale_attention ? Scalar(1) / std::sqrt(static_cast<Scalar>(p.cfg.d))
                              : Scalar(1);

    std::vector<Tape::Id> h_new(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto& incoming = in_edges[static_cast<std::size_t>(i)];
        Tape::Id pre;
        if (incoming.empty()) {
            // Empty neighborhood: the residual sum degenerates to h_i.
            pre = h_prev[static_cast<std::size_t>(i)];
        } else {
            std::vector<Tape::Id> logits;
            std::vector<Tape::Id> messages;
            logits.reserve(incoming.size());
            messages.reserve(incoming.size());
            for (int k : incoming) {
                const auto& e = edges[static_cast<std::size_t>(k)];
                const Tape::Id eh = enhanced[static_cast<std::size_t>(k)];
                const Tape::Id qi = t.add(h_prev[static_cast<std::size_t>(i)], eh);
                const Tape::Id qj =
                    t.add(h_prev[static_cast<std::size_t>(e.src)], eh);
                Tape::Id logit = t.dot(qi, qj);
                if (logit_scale != Scalar(1)) logit = t.scale(logit, logit_scale);
                logits.push_back(logit);
                messages.push_back(nets.msg_net.forward(
                    t, t.concat({h_prev[static_cast<std::size_t>(e.src)], eh})));
            }
            const Tape::Id alpha = t.softmax_(t.stack(logits));
            if (diag != nullptr) {
                diag->alpha_sums.push_back(t.value(alpha).sum());
            }
            const Tape::Id agg = t.weighted_sum(messages, alpha);
            pre = t.add(h_prev[static_cast<std::size_t>(i)], agg);
        }
        const Tape::Id out = nets.update_net.forward(t, pre);
        if (!t.value(out).allFinite()) {
            throw std::runtime_error("gnn local update produced a non-finite state "
                                     "at node " +
                                     std::to_string(i));
        }
        h_new[static_cast<std::size_t>(i)] = out;
    }
    return h_new;
}

Tape::Id gnn_root_update(Tape& t, const GnnParams& p,
                         const std::vector<Tape::Id>& h_prev, Tape::Id root_prev,
                         GnnDiagnostics* diag) {
    if (h_prev.empty()) {
        throw std::invalid_argument("gnn_root_update: graph has no nodes");
    }
    std::vector<Tape::Id> gate_logits;
    gate_logits.reserve(h_prev.size());
    for (const Tape::Id h : h_prev) {
        gate_logits.push_back(t.affine(*p.gate_w, p.gate_b, h));
    }
    const Tape::Id gates = t.softmax_(t.stack(gate_logits));
    if (diag != nullptr) {
        diag->gate_sums.push_back(t.value(gates).sum());
    }
    const Tape::Id pooled = t.weighted_sum(h_prev, gates);
    return t.add(root_prev, pooled);
}

std::vector<Tape::Id> gnn_fuse_root(Tape& t, const GnnParams& p, Tape::Id root,
                                    const std::vector<Tape::Id>& h_local) {
    const Tape::Id broadcast = t.tanh_(t.affine(*p.psi_w, p.psi_b, root));
    std::vector<Tape::Id> fused;
    fused.reserve(h_local.size());
    for (const Tape::Id h : h_local) {
        fused.push_back(t.add(broadcast, h));
    }
    return fused;
}

GnnForwardResult gnn_forward(Tape& t, const GnnParams& p,
                             const std::vector<Tape::Id>& node0,
                             const std::vector<GnnEdgeIn>& edges,
                             GnnDiagnostics* diag) {
    if (node0.empty()) {
        throw std::invalid_argument("gnn_forward: graph has no nodes");
    }
    GnnForwardResult r;
    std::vector<Tape::Id> h = node0;
    Tape::Id root = t.param_vector(*p.root0);
    for (int l = 0; l < p.cfg.layers; ++l) {
        // The root reads the pre-layer node states, then its transform is
        // fused into the freshly updated ones.
        std::vector<Tape::Id> h_local = gnn_local_update(t, p, l, h, edges, diag);
        root = gnn_root_update(t, p, h, root, diag);
        h = gnn_fuse_root(t, p, root, h_local);
    }
    r.node_states = std::move(h);
    r.root_state = root;
    return r;
}

Vec enhance_edge(const GnnParams& p, int layer, EdgeType etype, const Vec& e) {
    check_layer(p, layer);
    if (e.size() != p.cfg.d_e) {
        throw std::invalid_argument("enhance_edge: attribute has dim " +
                                    std::to_string(e.size()) + ", expected " +
                                    std::to_string(p.cfg.d_e));
    }
    Tape t;
    return t.value(enhance_edge_node(t, p, layer, etype, t.constant(e)));
}

Vec attention_weights(const Vec& h_i, const std::vector<Vec>& h_neighbors,
                      const std::vector<Vec>& enhanced_edges,
                      bool scale_by_sqrt_d) {
    if (h_neighbors.size() != enhanced_edges.size()) {
        throw std::invalid_argument(
            "attention_weights: neighbor/edge count mismatch");
    }
    if (h_neighbors.empty()) return Vec();
    Vec logits(static_cast<Eigen::Index>(h_neighbors.size()));
    for (std::size_t j = 0; j < h_neighbors.size(); ++j) {
        const Vec& eh = enhanced_edges[j];
        if (eh.size() != h_i.size() || h_neighbors[j].size() != h_i.size()) {
            throw std::invalid_argument("attention_weights: dimension mismatch");
        }
        logits[static_cast<Eigen::Index>(j)] =
            (h_i + eh).dot(h_neighbors[j] + eh);
    }
    if (scale_by_sqrt_d) logits /= std::sqrt(static_cast<Scalar>(h_i.size()));
    softmax_inplace(logits);
    return logits;
}

}  // namespace omidet
