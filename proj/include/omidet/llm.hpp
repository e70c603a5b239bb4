#pragma once

// LLM annotator clients.
//
// Wire contract: request = {system, context, model_name}; response =
// {text, prompt_tokens, completion_tokens}. Responses are cached on disk,
// one JSON record per call, keyed by sha256(system+context+model); the
// prompt version namespaces the cache directory so template changes never
// serve stale replies.
//
// Two client kinds: a remote HTTP client (chat-completions style endpoint,
// bounded retries with exponential backoff) and a deterministic offline
// stub that recognizes each prompt template by its marker strings and
// answers by fixed rules, so the whole pipeline runs reproducibly with no
// network.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace omidet {

struct LlmRequest {
    std::string system;
    std::string context;
    std::string model_name;
};

struct LlmResponse {
    std::string text;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

// Thrown when a remote call keeps failing after the configured retries.
class LlmError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class LlmClientKind { Stub, Remote };

std::string llm_client_kind_name(LlmClientKind kind);
LlmClientKind llm_client_kind_from_name(const std::string& name);

struct LlmClientSpec {
    LlmClientKind kind = LlmClientKind::Stub;
    std::string model_name = "gpt-4o-mini";
    std::string prompt_version = "v1";
    int max_parallel = 4;
    int retry_limit = 3;
    // Remote only: plain-HTTP endpoint, e.g. "http://localhost:8080"; the
    // bearer token is read from the environment variable named below.
    std::string endpoint;
    std::string api_key_env = "OMIDET_API_KEY";
};

struct LlmCallStats {
    std::int64_t logical_calls = 0;  // completions requested by the pipeline
    std::int64_t inner_calls = 0;    // calls that reached the wrapped client
    std::int64_t cache_hits = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

class LlmClient {
  public:
    virtual ~LlmClient() = default;
    virtual LlmResponse complete(const LlmRequest& req) = 0;
    virtual std::string kind() const = 0;
    virtual LlmCallStats stats() const { return {}; }
};

// Deterministic offline annotator. Prompt templates are recognized by
// marker substrings; replies follow fixed rules:
//  - veracity judgment: "0" or "1" by a stable hash of the news text;
//  - omission-intent inference: a context segment is flagged when it
//    contains a content token that appears in at least one *other*
//    registered environment item but in no target segment; the reply lists
//    one {[env], [intent], [target]} triple per flagged segment, pairing
//    each with the highest-token-overlap target segment, or reads
//    "no omissions found" when nothing qualifies. Cross-item visibility
//    requires register_environment() before the calls for that target.
//  - batch type analysis: two fixed [Type, Description] lines;
//  - consolidation: the eight canonical omission types;
//  - simulation: one triple per prompt in zero mode, two in rule mode (the
//    guidance block is the trigger).
// Token counts use the whitespace+punctuation approximation; see
// approx_token_count.
class StubLlmClient : public LlmClient {
  public:
    StubLlmClient() = default;

    // Declares the environment items (each a list of segment texts)
    // retrieved for a target (its segment texts). Needed only for the
    // intent-inference rule.
    void register_environment(const std::vector<std::string>& target_segments,
                              const std::vector<std::vector<std::string>>& env_items);

    LlmResponse complete(const LlmRequest& req) override;
    std::string kind() const override { return "stub"; }
    LlmCallStats stats() const override;

  private:
    struct RegisteredEnv {
        std::vector<std::vector<std::string>> items;
    };

    mutable std::mutex mu_;
    std::unordered_map<std::string, RegisteredEnv> envs_;  // key: joined targets
    LlmCallStats stats_;
};

// Chat-completions HTTP client. Plain HTTP only; retries transient
// failures retry_limit times with exponential backoff, then throws
// LlmError. Missing usage numbers in the reply fall back to the
// approximate token count.
class RemoteLlmClient : public LlmClient {
  public:
    explicit RemoteLlmClient(LlmClientSpec spec);

    LlmResponse complete(const LlmRequest& req) override;
    std::string kind() const override { return "remote"; }
    LlmCallStats stats() const override;

  private:
    LlmClientSpec spec_;
    std::string host_;
    int port_ = 80;
    mutable std::mutex mu_;
    LlmCallStats stats_;
};

// Disk-backed response cache: <dir>/<key>.json per call.
class ResponseCache {
  public:
    explicit ResponseCache(std::filesystem::path directory);

    static std::string key_for(const LlmRequest& req);

    std::optional<LlmResponse> lookup(const std::string& key) const;
    void store(const std::string& key, const LlmResponse& resp);

  private:
    std::filesystem::path dir_;
    mutable std::mutex mu_;
};

// Serves from the cache, delegating misses to the inner client.
class CachingLlmClient : public LlmClient {
  public:
    CachingLlmClient(std::shared_ptr<LlmClient> inner,
                     std::shared_ptr<ResponseCache> cache);

    LlmResponse complete(const LlmRequest& req) override;
    std::string kind() const override;
    LlmCallStats stats() const override;

    const LlmClient& inner() const { return *inner_; }

  private:
    std::shared_ptr<LlmClient> inner_;
    std::shared_ptr<ResponseCache> cache_;
    mutable std::mutex mu_;
    LlmCallStats stats_;
};

// Builds the client for a spec; when cache_dir is non-empty the client is
// wrapped in a response cache namespaced by prompt_version.
std::shared_ptr<LlmClient> make_llm_client(
    const LlmClientSpec& spec, const std::filesystem::path& cache_dir = {},
    std::shared_ptr<LlmClient> stub_override = nullptr);

// Runs fn(0..n-1) with at most max_parallel worker threads; the first
// exception is rethrown after all workers finish.
void run_bounded_parallel(std::size_t n, int max_parallel,
                          const std::function<void(std::size_t)>& fn);

}  // namespace omidet
