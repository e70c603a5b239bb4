#include "omidet/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace omidet {

Tape::Id Tape::push(Vec v) {
    nodes_.push_back(Node{std::move(v), nullptr});
    return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::check(Id id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size()) {
        throw std::out_of_range("tape node id out of range");
    }
    return id;
}

Scalar Tape::scalar_value(Id id) const {
    const Vec& v = value(id);
    if (v.size() != 1) {
        throw std::invalid_argument("tape node is not scalar");
    }
    return v[0];
}

Tape::Id Tape::constant(Vec v) { return push(std::move(v)); }

Tape::Id Tape::param_vector(Param& p) {
    if (p.value.cols() != 1) {
        throw std::invalid_argument("parameter '" + p.name + "' is not a vector");
    }
    const Id out = push(p.value.col(0));
    nodes_[out].backprop = [this, out, &p] { p.grad.col(0) += grad(out); };
    return out;
}

Tape::Id Tape::affine(Param& W, Param* b, Id x) {
    check(x);
    if (W.value.cols() != size(x)) {
        throw std::invalid_argument("affine: '" + W.name + "' expects input " +
                                    std::to_string(W.value.cols()) + ", got " +
                                    std::to_string(size(x)));
    }
    Vec y = W.value * value(x);
    if (b != nullptr) {
        if (b->value.rows() != y.size() || b->value.cols() != 1) {
            throw std::invalid_argument("affine: bias '" + b->name +
                                        "' has wrong shape");
        }
        y += b->value.col(0);
    }
    const Id out = push(std::move(y));
    nodes_[out].backprop = [this, out, &W, b, x] {
        const Vec& g = grad(out);
        W.grad.noalias() += g * value(x).transpose();
        if (b != nullptr) b->grad.col(0) += g;
        grad(x).noalias() += W.value.transpose() * g;
    };
    return out;
}

Tape::Id Tape::add(Id a, Id b) {
    if (size(a) != size(b)) {
        throw std::invalid_argument("add: size mismatch");
    }
    const Id out = push(value(a) + value(b));
    nodes_[out].backprop = [this, out, a, b] {
        grad(a) += grad(out);
        grad(b) += grad(out);
    };
    return out;
}

Tape::Id Tape::sub(Id a, Id b) {
    if (size(a) != size(b)) {
        throw std::invalid_argument("sub: size mismatch");
    }
    const Id out = push(value(a) - value(b));
    nodes_[out].backprop = [this, out, a, b] {
        grad(a) += grad(out);
        grad(b) -= grad(out);
    };
    return out;
}

Tape::Id Tape::add_many(const std::vector<Id>& ids) {
    if (ids.empty()) {
        throw std::invalid_argument("add_many: empty input list");
    }
    Vec sum = value(ids[0]);
    for (std::size_t i = 1; i < ids.size(); ++i) {
        if (size(ids[i]) != sum.size()) {
            throw std::invalid_argument("add_many: size mismatch");
        }
        sum += value(ids[i]);
    }
    const Id out = push(std::move(sum));
    nodes_[out].backprop = [this, out, ids] {
        for (Id a : ids) grad(a) += grad(out);
    };
    return out;
}

Tape::Id Tape::scale(Id a, Scalar s) {
    const Id out = push(value(a) * s);
    nodes_[out].backprop = [this, out, a, s] { grad(a) += grad(out) * s; };
    return out;
}

Tape::Id Tape::cwise_abs(Id a) {
    const Id out = push(value(a).cwiseAbs());
    nodes_[out].backprop = [this, out, a] {
        const Vec& x = value(a);
        const Vec& g = grad(out);
        Vec& ga = grad(a);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] > 0) {
                ga[i] += g[i];
            } else if (x[i] < 0) {
                ga[i] -= g[i];
            }
        }
    };
    return out;
}

Tape::Id Tape::tanh_(Id a) {
    const Id out = push(value(a).array().tanh().matrix());
    nodes_[out].backprop = [this, out, a] {
        const Vec& y = value(out);
        grad(a).array() += grad(out).array() * (1.0 - y.array().square());
    };
    return out;
}

Tape::Id Tape::sigmoid_(Id a) {
    Vec y(size(a));
    const Vec& x = value(a);
    for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
    const Id out = push(std::move(y));
    nodes_[out].backprop = [this, out, a] {
        const Vec& yv = value(out);
        grad(a).array() += grad(out).array() * yv.array() * (1.0 - yv.array());
    };
    return out;
}

Tape::Id Tape::concat(const std::vector<Id>& ids) {
    if (ids.empty()) {
        throw std::invalid_argument("concat: empty input list");
    }
    Eigen::Index total = 0;
    for (Id a : ids) total += size(a);
    Vec y(total);
    Eigen::Index off = 0;
    for (Id a : ids) {
        y.segment(off, size(a)) = value(a);
        off += size(a);
    }
    const Id out = push(std::move(y));
    nodes_[out].backprop = [this, out, ids] {
        const Vec& g = grad(out);
        Eigen::Index off2 = 0;
        for (Id a : ids) {
            grad(a) += g.segment(off2, size(a));
            off2 += size(a);
        }
    };
    return out;
}

Tape::Id Tape::dot(Id a, Id b) {
    if (size(a) != size(b)) {
        throw std::invalid_argument("dot: size mismatch");
    }
    Vec y(1);
    y[0] = value(a).dot(value(b));
    const Id out = push(std::move(y));
    nodes_[out].backprop = [this, out, a, b] {
        const Scalar g = grad(out)[0];
        grad(a) += g * value(b);
        grad(b) += g * value(a);
    };
    return out;
}

Tape::Id Tape::pick(Id a, Eigen::Index i) {
    if (i < 0 || i >= size(a)) {
        throw std::out_of_range("pick: index out of range");
    }
    Vec y(1);
    y[0] = value(a)[i];
    const Id out = push(std::move(y));
    nodes_[out].backprop = [this, out, a, i] { grad(a)[i] += grad(out)[0]; };
    return out;
}

Tape::Id Tape::stack(const std::vector<Id>& scalars) {
    if (scalars.empty()) {
        throw std::invalid_argument("stack: empty input list");
    }
    Vec y(static_cast<Eigen::Index>(scalars.size()));
    for (std::size_t i = 0; i < scalars.size(); ++i) {
        if (size(scalars[i]) != 1) {
            throw std::invalid_argument("stack: inputs must be scalars");
        }
        y[static_cast<Eigen::Index>(i)] = value(scalars[i])[0];
    }
    const Id out = push(std::move(y));
    nodes_[out].backprop = [this, out, scalars] {
        const Vec& g = grad(out);
        for (std::size_t i = 0; i < scalars.size(); ++i) {
            grad(scalars[i])[0] += g[static_cast<Eigen::Index>(i)];
        }
    };
    return out;
}

Tape::Id Tape::softmax_(Id a) {
    Vec y = softmax(value(a));
    const Id out = push(std::move(y));
    nodes_[out].backprop = [this, out, a] {
        const Vec& yv = value(out);
        const Vec& g = grad(out);
        const Scalar gy = yv.dot(g);
        grad(a).array() += yv.array() * (g.array() - gy);
    };
    return out;
}

Tape::Id Tape::scale_by(Id v, Id s) {
    if (size(s) != 1) {
        throw std::invalid_argument("scale_by: scale must be scalar");
    }
    const Id out = push(value(v) * value(s)[0]);
    nodes_[out].backprop = [this, out, v, s] {
        const Vec& g = grad(out);
        grad(v) += g * value(s)[0];
        grad(s)[0] += value(v).dot(g);
    };
    return out;
}

Tape::Id Tape::weighted_sum(const std::vector<Id>& vecs, Id weights) {
    if (vecs.empty()) {
        throw std::invalid_argument("weighted_sum: empty input list");
    }
    if (size(weights) != static_cast<Eigen::Index>(vecs.size())) {
        throw std::invalid_argument("weighted_sum: weight count mismatch");
    }
    const Vec& w = value(weights);
    Vec y = Vec::Zero(size(vecs[0]));
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        if (size(vecs[i]) != y.size()) {
            throw std::invalid_argument("weighted_sum: size mismatch");
        }
        y += w[static_cast<Eigen::Index>(i)] * value(vecs[i]);
    }
    const Id out = push(std::move(y));
    nodes_[out].backprop = [this, out, vecs, weights] {
        const Vec& g = grad(out);
        const Vec& wv = value(weights);
        for (std::size_t i = 0; i < vecs.size(); ++i) {
            const auto idx = static_cast<Eigen::Index>(i);
            grad(vecs[i]) += wv[idx] * g;
            grad(weights)[idx] += value(vecs[i]).dot(g);
        }
    };
    return out;
}

Tape::Id Tape::mean_of(const std::vector<Id>& vecs) {
    return scale(add_many(vecs), Scalar(1) / static_cast<Scalar>(vecs.size()));
}

Tape::Id Tape::bce(Id p, int y) {
    if (size(p) != 1) {
        throw std::invalid_argument("bce: probability must be scalar");
    }
    if (y != 0 && y != 1) {
        throw std::invalid_argument("bce: label must be 0 or 1");
    }
    constexpr Scalar eps = 1e-7;
    const Scalar pv = std::clamp(value(p)[0], eps, Scalar(1) - eps);
    Vec loss(1);
    loss[0] = (y == 1) ? -std::log(pv) : -std::log(Scalar(1) - pv);
    const Id out = push(std::move(loss));
    nodes_[out].backprop = [this, out, p, y, pv] {
        const Scalar raw = value(p)[0];
        if (raw <= 1e-7 || raw >= 1.0 - 1e-7) return;  // clamped: flat
        const Scalar g = grad(out)[0];
        const Scalar d = (y == 1) ? (-1.0 / pv) : (1.0 / (1.0 - pv));
        grad(p)[0] += g * d;
    };
    return out;
}

void Tape::backward(Id root) {
    check(root);
    if (ran_backward_) {
        throw std::logic_error("tape backward called twice");
    }
    if (size(root) != 1) {
        throw std::invalid_argument("backward: root must be scalar");
    }
    ran_backward_ = true;
    grads_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        grads_[i] = Vec::Zero(nodes_[i].value.size());
    }
    grads_[static_cast<std::size_t>(root)][0] = 1.0;
    for (Id i = root; i >= 0; --i) {
        auto& node = nodes_[static_cast<std::size_t>(i)];
        if (node.backprop) node.backprop();
    }
}

}  // namespace omidet
