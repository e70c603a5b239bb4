#pragma once

// Multi-layer perceptron built on the parameter store and tape, plus the
// decoupled-weight-decay adaptive-moment optimizer used for training.

#include <string>
#include <vector>

#include "omidet/autodiff.hpp"
#include "omidet/params.hpp"

namespace omidet {

struct MlpConfig {
    int in_dim = 0;
    std::vector<int> hidden;  // may be empty (single linear layer)
    int out_dim = 0;
};

// Fully connected net with tanh after every hidden layer and a linear
// output. Weights are Glorot-uniform, biases zero; parameters register
// under "<prefix>.w<i>" / "<prefix>.b<i>".
class Mlp {
  public:
    Mlp(ParamStore& store, const std::string& prefix, const MlpConfig& cfg,
        Rng& rng);

    Tape::Id forward(Tape& t, Tape::Id x) const;
    // Tape-free forward for frozen/value-level use.
    Vec forward_value(const Vec& x) const;

    int in_dim() const { return cfg_.in_dim; }
    int out_dim() const { return cfg_.out_dim; }

  private:
    MlpConfig cfg_;
    std::vector<Param*> weights_;
    std::vector<Param*> biases_;
};

struct AdamWConfig {
    Scalar lr = 2e-5;
    Scalar beta1 = 0.9;
    Scalar beta2 = 0.999;
    Scalar eps = 1e-8;
    Scalar weight_decay = 0.01;
};

// Adaptive-moment optimizer with decoupled weight decay. Moment buffers
// live on the parameters; the step count lives here, so one optimizer
// instance must own a training run end to end.
class AdamW {
  public:
    explicit AdamW(const AdamWConfig& cfg) : cfg_(cfg) {}

    void step(ParamStore& store);
    int steps_taken() const { return t_; }

  private:
    AdamWConfig cfg_;
    int t_ = 0;
};

}  // namespace omidet
