#pragma once

// Text encoders and the contextual-environment selector.
//
// Two encoder kinds share one interface: a fully offline hashing encoder
// (token n-grams scattered into a fixed number of buckets, L2-normalized)
// and an adapter for pretrained-LM vectors served from a content-addressed
// cache. Candidate ranking picks the top-K most cosine-similar context
// items for a target.

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "omidet/corpus.hpp"
#include "omidet/math.hpp"

namespace omidet {

// Embedding with its L2 norm cached at construction time.
struct Embedding {
    Vec values;
    Scalar norm = 0.0;
};

Embedding make_embedding(Vec values);

// Cosine over cached norms; throws on dimension mismatch or zero norm.
Scalar cosine(const Embedding& a, const Embedding& b);

enum class EncoderKind { HashStub, PretrainedLm };

std::string encoder_kind_name(EncoderKind kind);
EncoderKind encoder_kind_from_name(const std::string& name);

struct EncoderSpec {
    EncoderKind kind = EncoderKind::HashStub;
    int dimension = 768;
    std::string version = "v1";  // participates in cache keys
};

class TextEncoder {
  public:
    virtual ~TextEncoder() = default;
    // Deterministic per (text, spec().version). Throws on empty text.
    virtual Vec encode(const std::string& text) const = 0;
    virtual const EncoderSpec& spec() const = 0;
    int dim() const { return spec().dimension; }

    Embedding embed(const std::string& text) const {
        return make_embedding(encode(text));
    }
};

// Offline deterministic encoder: lowercased token unigrams and bigrams are
// hashed into `dimension` buckets (one count each), then the vector is
// L2-normalized. Texts that tokenize to nothing fall back to hashing the
// raw bytes so every non-empty text has positive norm.
class HashingEncoder : public TextEncoder {
  public:
    explicit HashingEncoder(int dimension, std::string version = "v1");

    Vec encode(const std::string& text) const override;
    const EncoderSpec& spec() const override { return spec_; }

    // Bucket indices that a given text touches; exposed so tests can verify
    // disjoint-bucket claims directly.
    std::vector<int> buckets(const std::string& text) const;

  private:
    EncoderSpec spec_;
};

// Content-addressed store of embedding vectors. Keys are
// sha256(version || '\0' || text). When bound to a directory the cache
// persists one little-endian binary file per vector plus an append-only
// JSONL manifest; without a directory it is memory-only. Reads are
// lock-free after warm-up is not attempted: all access is serialized by a
// mutex, which is cheap at the scales this artifact targets.
class EmbeddingCache {
  public:
    EmbeddingCache() = default;
    explicit EmbeddingCache(std::filesystem::path directory);

    static std::string key_for(const std::string& text, const std::string& version);

    std::optional<Vec> lookup(const std::string& key) const;
    void store(const std::string& key, const Vec& values);

    std::size_t size() const;

  private:
    std::filesystem::path vector_path(const std::string& key) const;

    std::filesystem::path dir_;
    mutable std::mutex mu_;
    mutable std::unordered_map<std::string, Vec> mem_;
};

// Serves vectors through a cache. With an inner encoder, misses are
// computed and stored; without one (the pretrained-LM adapter case, where
// vectors must be precomputed out of process) a miss is an error naming
// the cache key.
class CachedEncoder : public TextEncoder {
  public:
    CachedEncoder(EncoderSpec spec, std::shared_ptr<EmbeddingCache> cache,
                  std::shared_ptr<const TextEncoder> inner = nullptr);

    Vec encode(const std::string& text) const override;
    const EncoderSpec& spec() const override { return spec_; }

  private:
    EncoderSpec spec_;
    std::shared_ptr<EmbeddingCache> cache_;
    std::shared_ptr<const TextEncoder> inner_;
};

// Builds the encoder for a spec. HashStub needs no cache; PretrainedLm
// requires a cache directory holding precomputed vectors.
std::shared_ptr<const TextEncoder> make_encoder(
    const EncoderSpec& spec, std::shared_ptr<EmbeddingCache> cache = nullptr);

// Contextual environment of a target: context items ranked by cosine
// similarity (descending, ties broken by ascending id), truncated to K.
struct ContextEnvironment {
    std::string target_id;
    std::vector<std::pair<std::string, Scalar>> ranked;
    int k = 0;

    std::vector<std::string> member_ids() const {
        std::vector<std::string> out;
        out.reserve(ranked.size());
        for (const auto& [id, sim] : ranked) out.push_back(id);
        return out;
    }
};

// Core ranking over precomputed embeddings.
ContextEnvironment rank_candidates(
    const std::string& target_id, const Embedding& target,
    const std::vector<std::pair<std::string, Embedding>>& candidates, int k);

// Convenience wrapper: encodes the full text of the target and of every
// pool member, then ranks. Empty pools yield an empty environment.
ContextEnvironment select_environment(const NewsItem& target,
                                      const CandidatePool& pool, int k,
                                      const TextEncoder& encoder,
                                      const Corpus& context_corpus);

}  // namespace omidet
