#include "omidet/encoder.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "omidet/text.hpp"

namespace omidet {

using nlohmann::json;

Embedding make_embedding(Vec values) {
    Embedding e;
    e.norm = values.norm();
    e.values = std::move(values);
    return e;
}

Scalar cosine(const Embedding& a, const Embedding& b) {
    if (a.values.size() != b.values.size()) {
        throw std::invalid_argument("cosine: dimension mismatch");
    }
    if (a.norm <= 0.0 || b.norm <= 0.0) {
        throw std::invalid_argument("cosine: zero-norm embedding");
    }
    const Scalar c = a.values.dot(b.values) / (a.norm * b.norm);
    return std::clamp(c, Scalar(-1), Scalar(1));
}

std::string encoder_kind_name(EncoderKind kind) {
    switch (kind) {
        case EncoderKind::HashStub: return "hash-stub";
        case EncoderKind::PretrainedLm: return "lm";
    }
    throw std::logic_error("encoder_kind_name: bad enum");
}

EncoderKind encoder_kind_from_name(const std::string& name) {
    if (name == "hash-stub") return EncoderKind::HashStub;
    if (name == "lm") return EncoderKind::PretrainedLm;
    throw std::invalid_argument("unknown encoder kind '" + name + "'");
}

HashingEncoder::HashingEncoder(int dimension, std::string version) {
    if (dimension <= 0) {
        throw std::invalid_argument("HashingEncoder: dimension must be positive");
    }
    spec_.kind = EncoderKind::HashStub;
    spec_.dimension = dimension;
    spec_.version = std::move(version);
}

std::vector<int> HashingEncoder::buckets(const std::string& text) const {
    const auto d = static_cast<std::uint64_t>(spec_.dimension);
    std::vector<int> out;
    const std::vector<std::string> tokens = tokenize(text);
    if (tokens.empty()) {
        // Degenerate text: hash the raw bytes so the vector is non-zero.
        out.push_back(static_cast<int>(fnv1a64(text) % d));
        return out;
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out.push_back(static_cast<int>(fnv1a64(tokens[i]) % d));
        if (i + 1 < tokens.size()) {
            out.push_back(static_cast<int>(fnv1a64(tokens[i] + " " + tokens[i + 1]) % d));
        }
    }
    return out;
}

Vec HashingEncoder::encode(const std::string& text) const {
    if (text.empty()) {
        throw std::invalid_argument("encode: empty text");
    }
    Vec v = Vec::Zero(spec_.dimension);
    for (int b : buckets(text)) v[b] += 1.0;
    const Scalar norm = v.norm();
    if (norm > 0.0) v /= norm;
    return v;
}

namespace {

constexpr std::uint32_t kVecMagic = 0x4F4D4956;  // "OMIV"

void write_vector_file(const std::filesystem::path& path, const Vec& v) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write embedding file " + path.string());
    }
    const std::uint32_t magic = kVecMagic;
    const std::uint32_t dim = static_cast<std::uint32_t>(v.size());
    out.write(reinterpret_cast<const char*>(&magic), sizeof magic);
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(sizeof(Scalar) * v.size()));
}

std::optional<Vec> read_vector_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::uint32_t magic = 0, dim = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof magic);
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    if (!in || magic != kVecMagic) {
        throw std::runtime_error("corrupt embedding file " + path.string());
    }
    Vec v(static_cast<Eigen::Index>(dim));
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(sizeof(Scalar) * dim));
    if (!in) {
        throw std::runtime_error("truncated embedding file " + path.string());
    }
    return v;
}

}  // namespace

EmbeddingCache::EmbeddingCache(std::filesystem::path directory)
    : dir_(std::move(directory)) {
    std::filesystem::create_directories(dir_);
}

std::string EmbeddingCache::key_for(const std::string& text,
                                    const std::string& version) {
    std::string payload = version;
    payload.push_back('\0');
    payload += text;
    return sha256_hex(payload);
}

std::filesystem::path EmbeddingCache::vector_path(const std::string& key) const {
    return dir_ / (key + ".vec");
}

std::optional<Vec> EmbeddingCache::lookup(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = mem_.find(key);
    if (it != mem_.end()) return it->second;
    if (dir_.empty()) return std::nullopt;
    auto loaded = read_vector_file(vector_path(key));
    if (loaded) mem_.emplace(key, *loaded);
    return loaded;
}

void EmbeddingCache::store(const std::string& key, const Vec& values) {
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = mem_.emplace(key, values);
    if (!inserted) return;  // already present; content-addressed, so identical
    if (dir_.empty()) return;
    write_vector_file(vector_path(key), values);
    std::ofstream manifest(dir_ / "manifest.jsonl", std::ios::app);
    manifest << json{{"key", key}, {"dim", values.size()}}.dump() << '\n';
}

std::size_t EmbeddingCache::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return mem_.size();
}

CachedEncoder::CachedEncoder(EncoderSpec spec, std::shared_ptr<EmbeddingCache> cache,
                             std::shared_ptr<const TextEncoder> inner)
    : spec_(std::move(spec)), cache_(std::move(cache)), inner_(std::move(inner)) {
    if (!cache_) {
        throw std::invalid_argument("CachedEncoder: cache required");
    }
}

Vec CachedEncoder::encode(const std::string& text) const {
    if (text.empty()) {
        throw std::invalid_argument("encode: empty text");
    }
    const std::string key = EmbeddingCache::key_for(text, spec_.version);
    if (auto hit = cache_->lookup(key)) {
        if (hit->size() != spec_.dimension) {
            throw std::runtime_error("cached embedding " + key + " has dim " +
                                     std::to_string(hit->size()) + ", expected " +
                                     std::to_string(spec_.dimension));
        }
        return *hit;
    }
    if (!inner_) {
        throw std::runtime_error(
            "no cached embedding for text key " + key +
            " (pretrained-LM vectors must be precomputed into the cache)");
    }
    Vec v = inner_->encode(text);
    cache_->store(key, v);
    return v;
}

std::shared_ptr<const TextEncoder> make_encoder(
    const EncoderSpec& spec, std::shared_ptr<EmbeddingCache> cache) {
    switch (spec.kind) {
        case EncoderKind::HashStub: {
            auto raw = std::make_shared<HashingEncoder>(spec.dimension, spec.version);
            if (!cache) return raw;
            return std::make_shared<CachedEncoder>(spec, std::move(cache), raw);
        }
        case EncoderKind::PretrainedLm: {
            if (!cache) {
                throw std::invalid_argument(
                    "lm encoder requires an embedding cache of precomputed vectors");
            }
            return std::make_shared<CachedEncoder>(spec, std::move(cache), nullptr);
        }
    }
    throw std::logic_error("make_encoder: bad enum");
}

ContextEnvironment rank_candidates(
    const std::string& target_id, const Embedding& target,
    const std::vector<std::pair<std::string, Embedding>>& candidates, int k) {
    if (k < 1) {
        throw std::invalid_argument("rank_candidates: K must be >= 1");
    }
    ContextEnvironment env;
    env.target_id = target_id;
    env.k = k;
    env.ranked.reserve(candidates.size());
    for (const auto& [id, emb] : candidates) {
        env.ranked.emplace_back(id, cosine(target, emb));
    }
    std::sort(env.ranked.begin(), env.ranked.end(),
              [](const auto& a, const auto& b) {
                  if (a.second != b.second) return a.second > b.second;
                  return a.first < b.first;
              });
    if (env.ranked.size() > static_cast<std::size_t>(k)) {
        env.ranked.resize(static_cast<std::size_t>(k));
    }
    return env;
}

ContextEnvironment select_environment(const NewsItem& target,
                                      const CandidatePool& pool, int k,
                                      const TextEncoder& encoder,
                                      const Corpus& context_corpus) {
    const Embedding target_emb = encoder.embed(target.text);
    std::vector<std::pair<std::string, Embedding>> candidates;
    candidates.reserve(pool.member_ids.size());
    for (const auto& id : pool.member_ids) {
        candidates.emplace_back(id, encoder.embed(context_corpus.get(id).text));
    }
    return rank_candidates(target.id, target_emb, candidates, k);
}

}  // namespace omidet
