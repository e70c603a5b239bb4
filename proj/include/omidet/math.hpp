#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>

namespace omidet {

using Scalar = double;
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Cosine similarity of two dense vectors, clamped to [-1, 1].
/// Throws on dimension mismatch or zero-norm input.
template <typename A, typename B>
Scalar cosine(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine: dimension mismatch");
    }
    const Scalar na = a.norm();
    const Scalar nb = b.norm();
    if (na <= Scalar(0) || nb <= Scalar(0)) {
        throw std::invalid_argument("cosine: zero-norm input");
    }
    const Scalar c = a.dot(b) / (na * nb);
    return c < Scalar(-1) ? Scalar(-1) : (c > Scalar(1) ? Scalar(1) : c);
}

/// In-place softmax with max-subtraction.
template <typename D>
void softmax_inplace(Eigen::MatrixBase<D>& z) {
    if (z.size() == 0) return;
    const Scalar m = z.maxCoeff();
    z = (z.array() - m).exp();
    z /= z.sum();
}

inline Vec softmax(Vec z) {
    softmax_inplace(z);
    return z;
}

inline Scalar sigmoid(Scalar x) {
    if (x >= 0) {
        return Scalar(1) / (Scalar(1) + std::exp(-x));
    }
    const Scalar e = std::exp(x);
    return e / (Scalar(1) + e);
}

/// Inverse of sigmoid; requires p strictly inside (0, 1).
inline Scalar logit(Scalar p) {
    if (!(p > Scalar(0) && p < Scalar(1))) {
        throw std::invalid_argument("logit: argument must lie in (0, 1)");
    }
    return std::log(p / (Scalar(1) - p));
}

inline Scalar clamp_unit(Scalar p, Scalar eps) {
    return p < eps ? eps : (p > Scalar(1) - eps ? Scalar(1) - eps : p);
}

}  // namespace omidet
