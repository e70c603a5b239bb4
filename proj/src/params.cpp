#include "omidet/params.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace omidet {

using nlohmann::json;

Param& ParamStore::add_matrix(const std::string& name, Eigen::Index rows,
                              Eigen::Index cols) {
    if (find(name) != nullptr) {
        throw std::invalid_argument("duplicate parameter '" + name + "'");
    }
    if (rows <= 0 || cols <= 0) {
        throw std::invalid_argument("parameter '" + name + "' has empty shape");
    }
    auto p = std::make_unique<Param>();
    p->name = name;
    p->value = Mat::Zero(rows, cols);
    p->grad = Mat::Zero(rows, cols);
    params_.push_back(std::move(p));
    return *params_.back();
}

Param& ParamStore::add_vector(const std::string& name, Eigen::Index n) {
    return add_matrix(name, n, 1);
}

Param* ParamStore::find(const std::string& name) {
    for (auto& p : params_) {
        if (p->name == name) return p.get();
    }
    return nullptr;
}

const Param* ParamStore::find(const std::string& name) const {
    for (const auto& p : params_) {
        if (p->name == name) return p.get();
    }
    return nullptr;
}

Eigen::Index ParamStore::total_size() const {
    Eigen::Index n = 0;
    for (const auto& p : params_) n += p->size();
    return n;
}

void ParamStore::zero_grads() {
    for (auto& p : params_) p->zero_grad();
}

bool ParamStore::grads_finite() const {
    for (const auto& p : params_) {
        if (!p->grad.allFinite()) return false;
    }
    return true;
}

void glorot_init(Param& p, Rng& rng) {
    const Scalar limit =
        std::sqrt(Scalar(6) / static_cast<Scalar>(p.value.rows() + p.value.cols()));
    for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
        for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
            p.value(r, c) = rng.uniform(-limit, limit);
        }
    }
}

void uniform_init(Param& p, Rng& rng, Scalar scale) {
    for (Eigen::Index c = 0; c < p.value.cols(); ++c) {
        for (Eigen::Index r = 0; r < p.value.rows(); ++r) {
            p.value(r, c) = rng.uniform(-scale, scale);
        }
    }
}

namespace {
constexpr char kCheckpointFormat[] = "omidet-checkpoint-1";
}

void save_params(const ParamStore& store, const std::filesystem::path& path,
                 const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write checkpoint " + path.string());
    }
    json table = json::array();
    for (const auto& p : store.all()) {
        table.push_back({{"name", p->name},
                         {"rows", p->value.rows()},
                         {"cols", p->value.cols()}});
    }
    const json header{{"format", kCheckpointFormat},
                      {"config_hash", config_hash},
                      {"params", std::move(table)}};
    out << header.dump() << '\n';
    for (const auto& p : store.all()) {
        out.write(reinterpret_cast<const char*>(p->value.data()),
                  static_cast<std::streamsize>(sizeof(Scalar) * p->value.size()));
    }
}

std::string load_params(ParamStore& store, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read checkpoint " + path.string());
    }
    std::string header_line;
    if (!std::getline(in, header_line)) {
        throw std::runtime_error("checkpoint " + path.string() + " has no header");
    }
    json header = json::parse(header_line);
    if (header.value("format", "") != kCheckpointFormat) {
        throw std::runtime_error("checkpoint " + path.string() +
                                 " has unsupported format '" +
                                 header.value("format", "") + "'");
    }
    const auto& table = header.at("params");
    if (table.size() != store.count()) {
        throw std::runtime_error(
            "checkpoint " + path.string() + " holds " +
            std::to_string(table.size()) + " parameters, model expects " +
            std::to_string(store.count()));
    }
    std::size_t i = 0;
    for (auto& p : store.all()) {
        const auto& rec = table[i++];
        if (rec.at("name").get<std::string>() != p->name ||
            rec.at("rows").get<Eigen::Index>() != p->value.rows() ||
            rec.at("cols").get<Eigen::Index>() != p->value.cols()) {
            throw std::runtime_error("checkpoint " + path.string() +
                                     " mismatches parameter '" + p->name + "'");
        }
        in.read(reinterpret_cast<char*>(p->value.data()),
                static_cast<std::streamsize>(sizeof(Scalar) * p->value.size()));
        if (!in) {
            throw std::runtime_error("checkpoint " + path.string() +
                                     " truncated at parameter '" + p->name + "'");
        }
    }
    return header.value("config_hash", "");
}

}  // namespace omidet
