#include "omidet/llm.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "omidet/taxonomy.hpp"
#include "omidet/text.hpp"

#include <httplib.h>

namespace omidet {

using nlohmann::json;

std::string llm_client_kind_name(LlmClientKind kind) {
    return kind == LlmClientKind::Stub ? "stub" : "remote";
}

LlmClientKind llm_client_kind_from_name(const std::string& name) {
    if (name == "stub") return LlmClientKind::Stub;
    if (name == "remote") return LlmClientKind::Remote;
    throw std::invalid_argument("unknown llm client kind '" + name + "'");
}

namespace {

std::int64_t approx_tokens_for(const LlmRequest& req) {
    return static_cast<std::int64_t>(
        approx_token_count(req.system + "\n" + req.context));
}

// Text between two markers, or empty when absent.
std::string between(const std::string& text, const std::string& begin,
                    const std::string& end) {
    const auto b = text.find(begin);
    if (b == std::string::npos) return {};
    const auto start = b + begin.size();
    const auto e = text.find(end, start);
    if (e == std::string::npos) return {};
    return text.substr(start, e - start);
}

// Quoted pieces ("...") extracted in order. Segment texts are assumed not
// to contain double quotes themselves; the offline corpora honour that.
std::vector<std::string> unquote_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (true) {
        const auto open = text.find('"', i);
        if (open == std::string::npos) break;
        const auto close = text.find('"', open + 1);
        if (close == std::string::npos) break;
        out.push_back(text.substr(open + 1, close - open - 1));
        i = close + 1;
    }
    return out;
}

std::string env_key(const std::vector<std::string>& target_segments) {
    std::string joined;
    for (const auto& s : target_segments) {
        joined += s;
        joined.push_back('\x1f');
    }
    return sha256_hex(joined);
}

std::string triple_line(const std::string& a, const std::string& b,
                        const std::string& c) {
    return "{[\"" + a + "\"], [" + b + "], [\"" + c + "\"]}";
}

std::string first_tokens(const std::string& text, std::size_t n) {
    const auto toks = tokenize(text);
    std::string out;
    for (std::size_t i = 0; i < toks.size() && i < n; ++i) {
        if (i) out += ' ';
        out += toks[i];
    }
    return out.empty() ? text : out;
}

}  // namespace

void StubLlmClient::register_environment(
    const std::vector<std::string>& target_segments,
    const std::vector<std::vector<std::string>>& env_items) {
    std::lock_guard<std::mutex> lock(mu_);
    envs_[env_key(target_segments)] = RegisteredEnv{env_items};
}

LlmCallStats StubLlmClient::stats() const {
    std::lock_guard<std::mutex> lock(mu_);
    return stats_;
}

LlmResponse StubLlmClient::complete(const LlmRequest& req) {
    LlmResponse resp;
    resp.prompt_tokens = approx_tokens_for(req);

    if (req.system.find("predict the veracity") != std::string::npos) {
        resp.text = (fnv1a64(req.context) % 2 == 0) ? "0" : "1";
    } else if (req.system.find("detect potential omissions") != std::string::npos) {
        // Omission-intent inference over one (target item, env item) pair.
        const auto targets = unquote_list(
            between(req.context, "[The Start of Target]", "[The End of Target]"));
        const auto env_segs = unquote_list(between(
            req.context, "[The Start of Environment]", "[The End of Environment]"));

        std::vector<std::vector<std::string>> all_items;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = envs_.find(env_key(targets));
            if (it != envs_.end()) all_items = it->second.items;
        }
        // Tokens visible in other environment items than the one prompted.
        std::set<std::string> other_tokens;
        for (const auto& item : all_items) {
            if (item == env_segs) continue;
            for (const auto& seg : item) {
                for (const auto& tok : content_tokens(seg)) other_tokens.insert(tok);
            }
        }
        std::set<std::string> target_tokens;
        for (const auto& seg : targets) {
            for (const auto& tok : tokenize(seg)) target_tokens.insert(tok);
        }
        std::vector<std::string> lines;
        for (const auto& seg : env_segs) {
            std::string best_token;
            for (const auto& tok : content_tokens(seg)) {
                if (other_tokens.count(tok) == 0) continue;
                if (target_tokens.count(tok) != 0) continue;
                if (best_token.empty() || tok < best_token) best_token = tok;
            }
            if (best_token.empty()) continue;
            std::size_t best_target = 0;
            double best_overlap = -1.0;
            for (std::size_t i = 0; i < targets.size(); ++i) {
                const double ov = token_jaccard(targets[i], seg);
                if (ov > best_overlap) {
                    best_overlap = ov;
                    best_target = i;
                }
            }
            lines.push_back(triple_line(
                seg, "omits shared context token: " + best_token,
                targets.empty() ? std::string() : targets[best_target]));
        }
        if (lines.empty()) {
            resp.text = "no omissions found";
        } else {
            for (std::size_t i = 0; i < lines.size(); ++i) {
                if (i) resp.text += '\n';
                resp.text += lines[i];
            }
        }
    } else if (req.system.find("summarize common omission types") !=
               std::string::npos) {
        resp.text =
            "[Numerical Comparison Omission, Omitting relevant comparative data "
            "to exaggerate or downplay the importance of certain statistics]\n"
            "[Background Information Omission, Deliberately omitting event "
            "background to prevent readers from understanding the complete "
            "situation]";
    } else if (req.system.find("merge similar patterns") != std::string::npos) {
        std::string out;
        for (const auto& t : canonical_omission_types()) {
            if (!out.empty()) out += '\n';
            out += t.as_line();
        }
        resp.text = std::move(out);
    } else if (req.system.find("generate omitted information") != std::string::npos) {
        // Simulation; the guidance block marks rule mode and earns one
        // extra triple.
        const auto targets = unquote_list(between(req.context,
                                                  "[The Start of Target Segments]",
                                                  "[The End of Target Segments]"));
        const bool rule_mode =
            req.system.find("[Contextual Omission]") != std::string::npos;
        std::vector<std::string> lines;
        if (!targets.empty()) {
            const std::string& t0 = targets.front();
            lines.push_back(triple_line(
                "unstated background regarding " + first_tokens(t0, 6),
                rule_mode ? "[Contextual Omission] deliberately omitting relevant "
                            "background information"
                          : "to support the narrative by leaving out context",
                t0));
            if (rule_mode) {
                const std::string& t1 = targets.size() > 1 ? targets[1] : t0;
                lines.push_back(triple_line(
                    "comparative figures absent around " + first_tokens(t1, 6),
                    "[Comparative Omission] omitting relevant comparative data",
                    t1));
            }
        }
        if (lines.empty()) {
            resp.text = "no omissions found";
        } else {
            for (std::size_t i = 0; i < lines.size(); ++i) {
                if (i) resp.text += '\n';
                resp.text += lines[i];
            }
        }
    } else {
        throw std::runtime_error("stub client: unrecognized prompt template");
    }

    resp.completion_tokens = static_cast<std::int64_t>(approx_token_count(resp.text));
    std::lock_guard<std::mutex> lock(mu_);
    stats_.logical_calls += 1;
    stats_.inner_calls += 1;
    stats_.prompt_tokens += resp.prompt_tokens;
    stats_.completion_tokens += resp.completion_tokens;
    return resp;
}

RemoteLlmClient::RemoteLlmClient(LlmClientSpec spec) : spec_(std::move(spec)) {
    if (spec_.endpoint.empty()) {
        throw std::invalid_argument("remote llm client requires an endpoint");
    }
    const std::string scheme = "http://";
    if (spec_.endpoint.rfind(scheme, 0) != 0) {
        throw std::invalid_argument("remote endpoint must be plain http:// (got '" +
                                    spec_.endpoint + "')");
    }
    std::string rest = spec_.endpoint.substr(scheme.size());
    const auto slash = rest.find('/');
    if (slash != std::string::npos) rest = rest.substr(0, slash);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) {
        host_ = rest;
    } else {
        host_ = rest.substr(0, colon);
        port_ = std::stoi(rest.substr(colon + 1));
    }
    if (host_.empty()) {
        throw std::invalid_argument("remote endpoint has no host: '" +
                                    spec_.endpoint + "'");
    }
}

LlmCallStats RemoteLlmClient::stats() const {
    std::lock_guard<std::mutex> lock(mu_);
    return stats_;
}

LlmResponse RemoteLlmClient::complete(const LlmRequest& req) {
    json body{{"model", req.model_name},
              {"messages",
               {{{"role", "system"}, {"content", req.system}},
                {{"role", "user"}, {"content", req.context}}}}};
    httplib::Headers headers;
    if (const char* key = std::getenv(spec_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= spec_.retry_limit; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(250LL << std::min(attempt - 1, 6)));
        }
        httplib::Client cli(host_, port_);
        cli.set_connection_timeout(10);
        cli.set_read_timeout(120);
        auto res = cli.Post("/v1/chat/completions", headers, body.dump(),
                            "application/json");
        if (!res) {
            last_error = "transport error " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "http status " + std::to_string(res->status);
            continue;
        }
        try {
            json parsed = json::parse(res->body);
            LlmResponse resp;
            resp.text = parsed.at("choices").at(0).at("message").at("content")
                            .get<std::string>();
            if (parsed.contains("usage")) {
                resp.prompt_tokens = parsed["usage"].value("prompt_tokens", 0);
                resp.completion_tokens = parsed["usage"].value("completion_tokens", 0);
            }
            if (resp.prompt_tokens == 0) resp.prompt_tokens = approx_tokens_for(req);
            if (resp.completion_tokens == 0) {
                resp.completion_tokens =
                    static_cast<std::int64_t>(approx_token_count(resp.text));
            }
            std::lock_guard<std::mutex> lock(mu_);
            stats_.logical_calls += 1;
            stats_.inner_calls += 1;
            stats_.prompt_tokens += resp.prompt_tokens;
            stats_.completion_tokens += resp.completion_tokens;
            return resp;
        } catch (const json::exception& e) {
            last_error = std::string("malformed reply: ") + e.what();
        }
    }
    throw LlmError("remote llm call failed after " +
                   std::to_string(spec_.retry_limit + 1) + " attempts: " +
                   last_error);
}

ResponseCache::ResponseCache(std::filesystem::path directory)
    : dir_(std::move(directory)) {
    std::filesystem::create_directories(dir_);
}

std::string ResponseCache::key_for(const LlmRequest& req) {
    return sha256_hex(req.system + req.context + req.model_name);
}

std::optional<LlmResponse> ResponseCache::lookup(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::ifstream in(dir_ / (key + ".json"));
    if (!in) return std::nullopt;
    json rec = json::parse(in);
    LlmResponse resp;
    resp.text = rec.at("text").get<std::string>();
    resp.prompt_tokens = rec.value("prompt_tokens", 0);
    resp.completion_tokens = rec.value("completion_tokens", 0);
    return resp;
}

void ResponseCache::store(const std::string& key, const LlmResponse& resp) {
    std::lock_guard<std::mutex> lock(mu_);
    std::ofstream out(dir_ / (key + ".json"));
    if (!out) {
        throw std::runtime_error("cannot write response cache entry " + key);
    }
    out << json{{"text", resp.text},
                {"prompt_tokens", resp.prompt_tokens},
                {"completion_tokens", resp.completion_tokens}}
               .dump()
        << '\n';
}

CachingLlmClient::CachingLlmClient(std::shared_ptr<LlmClient> inner,
                                   std::shared_ptr<ResponseCache> cache)
    : inner_(std::move(inner)), cache_(std::move(cache)) {
    if (!inner_ || !cache_) {
        throw std::invalid_argument("CachingLlmClient: inner client and cache required");
    }
}

std::string CachingLlmClient::kind() const { return inner_->kind(); }

LlmCallStats CachingLlmClient::stats() const {
    std::lock_guard<std::mutex> lock(mu_);
    LlmCallStats s = stats_;
    const LlmCallStats in = inner_->stats();
    s.inner_calls = in.inner_calls;
    return s;
}

LlmResponse CachingLlmClient::complete(const LlmRequest& req) {
    const std::string key = ResponseCache::key_for(req);
    if (auto hit = cache_->lookup(key)) {
        std::lock_guard<std::mutex> lock(mu_);
        stats_.logical_calls += 1;
        stats_.cache_hits += 1;
        stats_.prompt_tokens += hit->prompt_tokens;
        stats_.completion_tokens += hit->completion_tokens;
        return *hit;
    }
    LlmResponse resp = inner_->complete(req);
    cache_->store(key, resp);
    std::lock_guard<std::mutex> lock(mu_);
    stats_.logical_calls += 1;
    stats_.prompt_tokens += resp.prompt_tokens;
    stats_.completion_tokens += resp.completion_tokens;
    return resp;
}

std::shared_ptr<LlmClient> make_llm_client(const LlmClientSpec& spec,
                                           const std::filesystem::path& cache_dir,
                                           std::shared_ptr<LlmClient> stub_override) {
    std::shared_ptr<LlmClient> inner;
    if (spec.kind == LlmClientKind::Stub) {
        inner = stub_override ? std::move(stub_override)
                              : std::make_shared<StubLlmClient>();
    } else {
        inner = std::make_shared<RemoteLlmClient>(spec);
    }
    if (cache_dir.empty()) return inner;
    auto cache = std::make_shared<ResponseCache>(cache_dir / spec.prompt_version);
    return std::make_shared<CachingLlmClient>(std::move(inner), std::move(cache));
}

void run_bounded_parallel(std::size_t n, int max_parallel,
                          const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, max_parallel)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace omidet
