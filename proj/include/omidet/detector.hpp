#pragma once

// Detection head: target pooling, fusion with a base detector, loss, and
// the full trainable model that ties projections, the intra-edge
// attribute net, message passing and the fusion head to one parameter
// store.
//
// Fusion modes:
//   representation  y_hat = sigmoid(MLP(h_omi ‖ h_com))
//   prediction      z = logit(base score) + (w·h_omi + b),
//                   y_hat = (tanh(z) + 1) / 2
// The prediction-mode omission head starts at zero, so an untrained head
// leaves base decisions untouched at the 0.5 threshold.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "omidet/gnn.hpp"
#include "omidet/graph.hpp"
#include "omidet/nn.hpp"

namespace omidet {

enum class FusionMode { Representation, Prediction };

std::string fusion_mode_name(FusionMode m);
FusionMode fusion_mode_from_name(const std::string& name);

struct BaseDetectorOutput {
    FusionMode kind = FusionMode::Representation;
    std::optional<Vec> h_com;     // representation kind
    std::optional<Scalar> score;  // prediction kind, in (0,1)
};

// Mean of the final-layer states of target-source nodes only.
Vec pool_target(const std::vector<Vec>& node_states, const OmissionGraph& g);

// Binary cross-entropy with the prediction clamped to [1e-7, 1 - 1e-7].
Scalar bce_loss(Scalar y_hat, int y);

struct ModelConfig {
    int d_enc = 768;  // encoder output width
    GnnConfig gnn;
    FusionMode fusion = FusionMode::Representation;
    // Prediction mode: train the built-in base probe jointly (true) or
    // freeze it at its current values (false).
    bool joint_base = true;
    std::uint64_t seed = 1234;
};

// Frozen-encoder + linear-probe reference detector: logistic regression
// on the item embedding. Doubles as the target-only baseline and as the
// built-in base detector for prediction-mode fusion.
class BaseProbe {
  public:
    BaseProbe(int d_enc, std::uint64_t seed);

    Scalar score(const Vec& item_embedding) const;

    // One pass of mini-batch optimization; returns the mean training loss.
    Scalar train_epoch(const std::vector<Vec>& xs, const std::vector<int>& ys,
                       const std::vector<std::size_t>& order, int batch_size,
                       AdamW& opt);

    ParamStore& params() { return store_; }
    const ParamStore& params() const { return store_; }

  private:
    ParamStore store_;
    Param* w_ = nullptr;
    Param* b_ = nullptr;
};

class OmissionModel {
  public:
    explicit OmissionModel(const ModelConfig& cfg);

    struct Forward {
        Tape::Id y_hat = 0;  // probability, size-1 node
        Tape::Id h_omi = 0;
        Scalar base_score = 0.5;  // prediction mode only
        GnnForwardResult gnn;
    };

    // Full forward on the caller's tape. item_embedding is the raw
    // encoder vector of the whole target text (the base detector input).
    Forward forward(Tape& t, const OmissionGraph& g, const Vec& item_embedding,
                    GnnDiagnostics* diag = nullptr) const;

    Tape::Id loss(Tape& t, const Forward& f, int label) const;

    // Value-level single-item probability (throwaway tape).
    Scalar predict(const OmissionGraph& g, const Vec& item_embedding) const;

    // Intra-source edge attribute MLP(h_i ‖ h_j ‖ |h_i − h_j|) evaluated
    // on already-projected node states.
    Vec intra_edge_attr(const Vec& h_i, const Vec& h_j) const;

    // Fusion against an explicit base detector output; validates the
    // output shape for its kind (prediction score must lie in (0,1)).
    Scalar fuse_and_predict(const Vec& h_omi, const BaseDetectorOutput& base) const;

    ParamStore& params() { return store_; }
    const ParamStore& params() const { return store_; }
    const ModelConfig& config() const { return cfg_; }
    const GnnParams& gnn() const { return *gnn_; }

    void save(const std::filesystem::path& path, const std::string& config_hash) const;
    // Returns the config hash stored in the checkpoint.
    std::string load(const std::filesystem::path& path);

  private:
    Tape::Id project_node(Tape& t, const Vec& raw) const;
    Tape::Id fuse_representation(Tape& t, Tape::Id h_omi, const Vec& h_com) const;
    Tape::Id fuse_prediction(Tape& t, Tape::Id h_omi, Tape::Id base_logit) const;

    ModelConfig cfg_;
    ParamStore store_;
    Param* proj_node_w_ = nullptr;
    Param* proj_node_b_ = nullptr;
    Param* proj_intent_w_ = nullptr;
    Param* proj_intent_b_ = nullptr;
    std::optional<Mlp> intra_net_;    // 3d -> d_e
    std::optional<GnnParams> gnn_;
    std::optional<Mlp> fusion_net_;   // (d + d_enc) -> 1, representation mode
    Param* omi_head_w_ = nullptr;     // 1 x d, prediction mode, zero-init
    Param* omi_head_b_ = nullptr;
    Param* base_w_ = nullptr;         // built-in probe, prediction mode
    Param* base_b_ = nullptr;
};

}  // namespace omidet
