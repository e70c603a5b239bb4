#pragma once

// Reverse-mode automatic differentiation over dense vectors.
//
// A Tape records the forward computation as a flat list of vector-valued
// nodes (scalars are size-1 vectors). backward() seeds the chosen scalar
// node with 1 and replays the list in reverse, accumulating into the
// tape's per-node gradient buffers and directly into Param::grad for
// parameter leaves. One tape is built per forward pass and then dropped;
// tapes are not reusable across passes and not copyable.

#include <functional>
#include <vector>

#include "omidet/math.hpp"
#include "omidet/params.hpp"

namespace omidet {

class Tape {
  public:
    using Id = int;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Leaves.
    Id constant(Vec v);
    Id param_vector(Param& p);  // n-by-1 parameter as a vector leaf

    // y = W.value * x (+ b); gradients flow into W (and b) and x.
    Id affine(Param& W, Param* b, Id x);

    Id add(Id a, Id b);
    Id sub(Id a, Id b);
    Id add_many(const std::vector<Id>& ids);
    Id scale(Id a, Scalar s);
    Id cwise_abs(Id a);
    Id tanh_(Id a);
    Id sigmoid_(Id a);
    Id concat(const std::vector<Id>& ids);
    Id dot(Id a, Id b);                     // size-1
    Id pick(Id a, Eigen::Index i);          // component as size-1
    Id stack(const std::vector<Id>& scalars);
    Id softmax_(Id a);                      // max-subtracted
    Id scale_by(Id v, Id s);                // v * s[0]
    Id weighted_sum(const std::vector<Id>& vecs, Id weights);
    Id mean_of(const std::vector<Id>& vecs);
    // Binary cross-entropy of a probability (size-1 node) against label
    // y in {0,1}; the probability is clamped to [1e-7, 1-1e-7].
    Id bce(Id p, int y);

    const Vec& value(Id id) const { return nodes_[check(id)].value; }
    Scalar scalar_value(Id id) const;
    Eigen::Index size(Id id) const { return nodes_[check(id)].value.size(); }
    std::size_t node_count() const { return nodes_.size(); }

    // Backpropagates from a size-1 node. May be called once per tape.
    void backward(Id root);

  private:
    struct Node {
        Vec value;
        std::function<void()> backprop;  // null for leaves without inputs
    };

    Id push(Vec v);
    Id check(Id id) const;
    Vec& grad(Id id) { return grads_[static_cast<std::size_t>(id)]; }

    std::vector<Node> nodes_;
    std::vector<Vec> grads_;
    bool ran_backward_ = false;
};

}  // namespace omidet
