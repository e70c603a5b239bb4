#pragma once

// Omission-guided message passing.
//
// Per layer, from the previous layer's node states h and root state r:
//   1. every directed edge attribute e is enhanced with its type
//      embedding: e_hat = edge_net(h_type ‖ e);
//   2. each node aggregates its in-neighborhood with attention
//      alpha_ij = softmax_j((h_i + e_hat_ij)·(h_j + e_hat_ij)) over
//      messages m_ij = msg_net(h_j ‖ e_hat_ij), then maps through
//      update_net(h_i + sum_j alpha_ij m_ij); isolated nodes map through
//      update_net(h_i) alone;
//   3. the root accumulates a gated sum of the previous layer's node
//      states: r' = r + sum_i g_i h_i with g = softmax(W h_i + b);
//   4. the transformed root is broadcast back residually:
//      h_i' <- tanh(psi_w r' + psi_b) + h_i'.
// The enhancement, message and update nets are per-layer; the two type
// embeddings, the root gate, the root transform, and the initial root
// state are shared across layers.

#include <optional>
#include <string>
#include <vector>

#include "omidet/autodiff.hpp"
#include "omidet/graph.hpp"
#include "omidet/nn.hpp"
#include "omidet/params.hpp"

namespace omidet {

struct GnnConfig {
    int d = 256;                       // model width
    int d_e = 256;                     // edge-attribute width
    std::vector<int> hidden = {128, 128};
    int layers = 2;
    // Optional 1/sqrt(d) scaling of attention logits; off by default so
    // the dot product is used as-is.
    bool scale_attention = false;
};

struct GnnParams {
    GnnParams(ParamStore& store, const GnnConfig& cfg, Rng& rng);

    GnnConfig cfg;

    struct Layer {
        Mlp edge_net;    // (d + d_e) -> d
        Mlp msg_net;     // (d + d)   -> d
        Mlp update_net;  // d         -> d
    };
    std::vector<Layer> layers;

    Param* type_intra = nullptr;  // d
    Param* type_inter = nullptr;  // d
    Param* gate_w = nullptr;      // 1 x d
    Param* gate_b = nullptr;      // 1
    Param* psi_w = nullptr;       // d x d
    Param* psi_b = nullptr;       // d
    Param* root0 = nullptr;       // d, trainable initial root state
};

// One directed edge with its (tape-resident) attribute e of width d_e.
struct GnnEdgeIn {
    int src = 0;
    int dst = 0;
    EdgeType etype = EdgeType::Intra;
    Tape::Id attr = 0;
};

struct GnnDiagnostics {
    // One entry per (layer, non-isolated node): sum of that node's
    // attention weights.
    std::vector<Scalar> alpha_sums;
    // One entry per layer: sum of the root gate vector.
    std::vector<Scalar> gate_sums;
};

struct GnnForwardResult {
    std::vector<Tape::Id> node_states;  // final layer, one per node
    Tape::Id root_state = 0;
};

// Full stacked forward from initial node states (width d). Throws when a
// node update produces a non-finite value, naming the node.
GnnForwardResult gnn_forward(Tape& t, const GnnParams& p,
                             const std::vector<Tape::Id>& node0,
                             const std::vector<GnnEdgeIn>& edges,
                             GnnDiagnostics* diag = nullptr);

// The three layer stages, exposed so they can be composed or inspected
// individually; gnn_forward chains them.
std::vector<Tape::Id> gnn_local_update(Tape& t, const GnnParams& p, int layer,
                                       const std::vector<Tape::Id>& h_prev,
                                       const std::vector<GnnEdgeIn>& edges,
                                       GnnDiagnostics* diag = nullptr);
Tape::Id gnn_root_update(Tape& t, const GnnParams& p,
                         const std::vector<Tape::Id>& h_prev, Tape::Id root_prev,
                         GnnDiagnostics* diag = nullptr);
std::vector<Tape::Id> gnn_fuse_root(Tape& t, const GnnParams& p, Tape::Id root,
                                    const std::vector<Tape::Id>& h_local);

// Value-level views of single operations. Each runs a throwaway tape over
// the same builders, so there is exactly one implementation of the math.
Vec enhance_edge(const GnnParams& p, int layer, EdgeType etype, const Vec& e);

// Attention weights of one node over its in-neighbors given already
// enhanced edges; pure function of the inputs.
Vec attention_weights(const Vec& h_i, const std::vector<Vec>& h_neighbors,
                      const std::vector<Vec>& enhanced_edges,
                      bool scale_by_sqrt_d = false);

}  // namespace omidet
