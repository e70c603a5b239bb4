#include "omidet/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace omidet {

Mlp::Mlp(ParamStore& store, const std::string& prefix, const MlpConfig& cfg,
         Rng& rng)
    : cfg_(cfg) {
    if (cfg_.in_dim <= 0 || cfg_.out_dim <= 0) {
        throw std::invalid_argument("Mlp '" + prefix + "': dims must be positive");
    }
    std::vector<int> dims;
    dims.push_back(cfg_.in_dim);
    for (int h : cfg_.hidden) {
        if (h <= 0) {
            throw std::invalid_argument("Mlp '" + prefix +
                                        "': hidden sizes must be positive");
        }
        dims.push_back(h);
    }
    dims.push_back(cfg_.out_dim);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Param& w = store.add_matrix(prefix + ".w" + std::to_string(l),
                                    dims[l + 1], dims[l]);
        glorot_init(w, rng);
        Param& b = store.add_vector(prefix + ".b" + std::to_string(l), dims[l + 1]);
        weights_.push_back(&w);
        biases_.push_back(&b);
    }
}

Tape::Id Mlp::forward(Tape& t, Tape::Id x) const {
    Tape::Id h = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        h = t.affine(*weights_[l], biases_[l], h);
        if (l + 1 < weights_.size()) h = t.tanh_(h);
    }
    return h;
}

Vec Mlp::forward_value(const Vec& x) const {
    Vec h = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        h = weights_[l]->value * h + biases_[l]->value.col(0);
        if (l + 1 < weights_.size()) h = h.array().tanh().matrix();
    }
    return h;
}

void AdamW::step(ParamStore& store) {
    ++t_;
    const Scalar bc1 = Scalar(1) - std::pow(cfg_.beta1, t_);
    const Scalar bc2 = Scalar(1) - std::pow(cfg_.beta2, t_);
    for (auto& p : store.all()) {
        if (p->m1.size() == 0) {
            p->m1 = Mat::Zero(p->value.rows(), p->value.cols());
            p->m2 = Mat::Zero(p->value.rows(), p->value.cols());
        }
        p->m1 = cfg_.beta1 * p->m1 + (Scalar(1) - cfg_.beta1) * p->grad;
        p->m2 = cfg_.beta2 * p->m2.array().matrix() +
                (Scalar(1) - cfg_.beta2) * p->grad.array().square().matrix();
        const Mat m_hat = p->m1 / bc1;
        const Mat v_hat = p->m2 / bc2;
        p->value -=
            cfg_.lr * (m_hat.array() / (v_hat.array().sqrt() + cfg_.eps)).matrix();
        if (cfg_.weight_decay > 0) {
            p->value -= cfg_.lr * cfg_.weight_decay * p->value;
        }
    }
}

}  // namespace omidet
