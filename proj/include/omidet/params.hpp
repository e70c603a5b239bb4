#pragma once

// Trainable-parameter registry. Parameters are created once, in a fixed
// order, under unique names; the order drives deterministic
// initialization, optimizer iteration, and the checkpoint layout.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "omidet/math.hpp"

namespace omidet {

// Deterministic RNG with a platform-independent uniform mapping (the
// distribution classes in <random> are implementation-defined).
struct Rng {
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    std::mt19937_64 gen;

    Scalar uniform(Scalar lo, Scalar hi) {
        const Scalar u =
            static_cast<Scalar>(gen() >> 11) * 0x1.0p-53;  // [0, 1)
        return lo + (hi - lo) * u;
    }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return gen() % n; }
};

struct Param {
    std::string name;
    Mat value;
    Mat grad;
    // Optimizer moment estimates (lazily sized by the optimizer).
    Mat m1;
    Mat m2;

    Eigen::Index size() const { return value.size(); }
    void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

class ParamStore {
  public:
    ParamStore() = default;
    ParamStore(const ParamStore&) = delete;
    ParamStore& operator=(const ParamStore&) = delete;

    // Zero-initialized; callers overwrite with their init scheme.
    Param& add_matrix(const std::string& name, Eigen::Index rows, Eigen::Index cols);
    Param& add_vector(const std::string& name, Eigen::Index n);

    Param* find(const std::string& name);
    const Param* find(const std::string& name) const;

    const std::vector<std::unique_ptr<Param>>& all() const { return params_; }
    std::vector<std::unique_ptr<Param>>& all() { return params_; }

    std::size_t count() const { return params_.size(); }
    Eigen::Index total_size() const;

    void zero_grads();
    bool grads_finite() const;

  private:
    std::vector<std::unique_ptr<Param>> params_;  // stable addresses
};

// Glorot-uniform fill for a weight matrix; biases stay zero.
void glorot_init(Param& p, Rng& rng);
// Uniform(-scale, scale) fill, used for embeddings and the root state.
void uniform_init(Param& p, Rng& rng, Scalar scale);

// Binary checkpoint: a JSON header line (format version, config hash,
// parameter table) followed by raw little-endian doubles in registry
// order. Loading requires an exact name/shape match.
void save_params(const ParamStore& store, const std::filesystem::path& path,
                 const std::string& config_hash);
// Returns the config hash recorded in the file.
std::string load_params(ParamStore& store, const std::filesystem::path& path);

}  // namespace omidet
