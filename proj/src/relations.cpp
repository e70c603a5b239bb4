#include "omidet/relations.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

#include "omidet/prompts.hpp"
#include "omidet/text.hpp"

namespace omidet {

using nlohmann::json;

namespace {

// Strips whitespace and one layer of surrounding double quotes.
std::string clean_field(std::string s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s = trim(s.substr(1, s.size() - 2));
    }
    return s;
}

std::vector<std::string> bracket_groups(const std::string& raw) {
    // Depth-aware scan: a field may itself contain bracketed tags (rule
    // guidance encourages intents like "[Contextual Omission] ..."), so a
    // group only closes when its opening bracket is balanced again.
    std::vector<std::string> groups;
    std::size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] != '[') {
            ++i;
            continue;
        }
        int depth = 0;
        std::size_t j = i;
        for (; j < raw.size(); ++j) {
            if (raw[j] == '[') ++depth;
            else if (raw[j] == ']' && --depth == 0) break;
        }
        if (j >= raw.size()) break;  // unbalanced tail: discard
        groups.push_back(raw.substr(i + 1, j - i - 1));
        i = j + 1;
    }
    return groups;
}

// Index of `field` in `segments`: exact match after cleaning, then best
// token-Jaccard >= 0.5; -1 when nothing qualifies.
}  // namespace

int match_segment(const std::string& field, const std::vector<std::string>& segments) {
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (segments[i] == field) return static_cast<int>(i);
    }
    int best = -1;
    double best_score = 0.5;  // threshold
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const double score = token_jaccard(segments[i], field);
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::vector<ParsedTriple> extract_triples(const std::string& raw) {
    const auto groups = bracket_groups(raw);
    std::vector<ParsedTriple> out;
    for (std::size_t i = 0; i + 3 <= groups.size(); i += 3) {
        ParsedTriple t;
        t.env_text = clean_field(groups[i]);
        t.intent_text = clean_field(groups[i + 1]);
        t.target_text = clean_field(groups[i + 2]);
        out.push_back(std::move(t));
    }
    return out;
}

ParseResult parse_intent_response(const std::string& raw,
                                  const std::string& target_parent,
                                  const std::vector<std::string>& target_segments,
                                  const std::string& env_parent,
                                  const std::vector<std::string>& env_segments) {
    ParseResult result;
    const auto triples = extract_triples(raw);
    if (triples.empty()) {
        result.warning = !trim(raw).empty();
        return result;
    }
    for (const auto& t : triples) {
        const int env_idx = match_segment(t.env_text, env_segments);
        const int tgt_idx = match_segment(t.target_text, target_segments);
        if (env_idx < 0 || tgt_idx < 0 || t.intent_text.empty()) {
            ++result.dropped;
            continue;
        }
        IntentAnnotation a;
        a.target_seg = {target_parent, tgt_idx};
        a.context_seg = {env_parent, env_idx};
        a.flagged = true;
        a.intent_text = t.intent_text;
        result.annotations.push_back(std::move(a));
    }
    return result;
}

std::string serialize_annotations(const std::vector<IntentAnnotation>& annotations,
                                  const std::vector<std::string>& target_segments,
                                  const std::vector<std::string>& env_segments) {
    std::string out;
    for (const auto& a : annotations) {
        if (!a.flagged) continue;
        if (a.context_seg.index < 0 ||
            a.context_seg.index >= static_cast<int>(env_segments.size()) ||
            a.target_seg.index < 0 ||
            a.target_seg.index >= static_cast<int>(target_segments.size())) {
            throw std::out_of_range("serialize_annotations: segment index out of range");
        }
        if (!out.empty()) out += '\n';
        out += "{[\"" + env_segments[a.context_seg.index] + "\"], [" +
               a.intent_text + "], [\"" + target_segments[a.target_seg.index] +
               "\"]}";
    }
    return out;
}

namespace {

// Context segment texts grouped by parent item in first-appearance order.
std::vector<std::pair<std::string, std::vector<std::string>>> context_items(
    const OmissionGraph& g) {
    std::vector<std::pair<std::string, std::vector<std::string>>> items;
    for (const auto& node : g.nodes) {
        if (node.source != NodeSource::Context) continue;
        if (items.empty() || items.back().first != node.parent_id) {
            items.emplace_back(node.parent_id, std::vector<std::string>{});
        }
        items.back().second.push_back(node.text);
    }
    return items;
}

std::vector<std::string> target_texts(const OmissionGraph& g) {
    std::vector<std::string> out;
    for (int id : g.target_node_ids) out.push_back(g.nodes[id].text);
    return out;
}

}  // namespace

IntentStageResult infer_intents(const OmissionGraph& graph, LlmClient& client,
                                const std::string& model_name, int max_parallel) {
    IntentStageResult result;
    const auto targets = target_texts(graph);
    const auto items = context_items(graph);
    if (targets.empty() || items.empty()) return result;

    struct PerItem {
        ParseResult parsed;
        std::int64_t prompt_tokens = 0;
        std::int64_t completion_tokens = 0;
        bool failed = false;
    };
    std::vector<PerItem> per_item(items.size());
    const std::string target_parent = graph.nodes[graph.target_node_ids[0]].parent_id;

    run_bounded_parallel(items.size(), max_parallel, [&](std::size_t i) {
        const auto& [env_parent, env_segs] = items[i];
        const PromptPair prompt = render_intent_prompt(targets, env_segs);
        LlmRequest req{prompt.system, prompt.context, model_name};
        try {
            const LlmResponse resp = client.complete(req);
            per_item[i].prompt_tokens = resp.prompt_tokens;
            per_item[i].completion_tokens = resp.completion_tokens;
            per_item[i].parsed = parse_intent_response(resp.text, target_parent,
                                                       targets, env_parent, env_segs);
            const std::string key = ResponseCache::key_for(req);
            for (auto& a : per_item[i].parsed.annotations) a.raw_response_id = key;
        } catch (const LlmError&) {
            per_item[i].failed = true;
        }
    });

    for (const auto& r : per_item) {
        result.prompts_issued += 1;
        if (r.failed) {
            result.degraded = true;
            continue;
        }
        result.prompt_tokens += r.prompt_tokens;
        result.completion_tokens += r.completion_tokens;
        if (r.parsed.warning) result.parse_warnings += 1;
        result.parse_warnings += r.parsed.dropped;
        for (const auto& a : r.parsed.annotations) result.annotations.push_back(a);
    }
    return result;
}

void register_stub_environment(StubLlmClient& stub, const OmissionGraph& graph) {
    std::vector<std::vector<std::string>> items;
    for (auto& [parent, segs] : context_items(graph)) {
        (void)parent;
        items.push_back(segs);
    }
    stub.register_environment(target_texts(graph), items);
}

Vec encode_intent(const std::string& intent_text, const TextEncoder& encoder) {
    if (trim(intent_text).empty()) {
        throw std::invalid_argument("encode_intent: empty intent text on flagged pair");
    }
    return encoder.encode(intent_text);
}

namespace {

void add_inter_pair(OmissionGraph& g, int a, int b, const std::string& intent,
                    const Vec& emb) {
    for (const auto& [src, dst] : {std::pair{a, b}, std::pair{b, a}}) {
        GraphEdge e;
        e.src = src;
        e.dst = dst;
        e.etype = EdgeType::Inter;
        e.intent_text = intent;
        e.intent_embedding = emb;
        g.edges.push_back(std::move(e));
    }
}

}  // namespace

void apply_intent_annotations(OmissionGraph& g,
                              const std::vector<IntentAnnotation>& annotations,
                              const TextEncoder& encoder) {
    int added = 0;
    for (const auto& a : annotations) {
        if (!a.flagged) continue;
        const int tgt = find_node(g, a.target_seg.parent_id, a.target_seg.index);
        const int ctx = find_node(g, a.context_seg.parent_id, a.context_seg.index);
        if (tgt < 0 || ctx < 0) {
            throw std::runtime_error("apply_intent_annotations: annotation for '" +
                                     g.target_id + "' references unknown segment");
        }
        add_inter_pair(g, tgt, ctx, a.intent_text,
                       encode_intent(a.intent_text, encoder));
        ++added;
    }
    if (added > 0) return;

    // Neutral fallback: keep the sources connected so message passing can
    // still cross item boundaries.
    bool has_context = false;
    for (const auto& node : g.nodes) {
        if (node.source == NodeSource::Context) {
            has_context = true;
            break;
        }
    }
    if (!has_context) return;
    static const std::string kNeutral = "no omission detected";
    const Vec neutral_emb = encode_intent(kNeutral, encoder);
    for (int tgt : g.target_node_ids) {
        const Vec& tv = g.nodes[tgt].embedding;
        const Scalar tnorm = tv.norm();
        int best = -1;
        Scalar best_sim = -2.0;
        for (const auto& node : g.nodes) {
            if (node.source != NodeSource::Context) continue;
            const Scalar denom = tnorm * node.embedding.norm();
            const Scalar sim =
                denom > 0 ? tv.dot(node.embedding) / denom : Scalar(-1);
            if (sim > best_sim) {
                best_sim = sim;
                best = node.node_id;
            }
        }
        if (best >= 0) add_inter_pair(g, tgt, best, kNeutral, neutral_emb);
    }
}

std::string intent_stage_to_json(const IntentStageResult& r) {
    json anns = json::array();
    for (const auto& a : r.annotations) {
        anns.push_back({{"target_parent", a.target_seg.parent_id},
                        {"target_index", a.target_seg.index},
                        {"context_parent", a.context_seg.parent_id},
                        {"context_index", a.context_seg.index},
                        {"flagged", a.flagged},
                        {"intent", a.intent_text},
                        {"response_id", a.raw_response_id}});
    }
    return json{{"annotations", std::move(anns)},
                {"prompts_issued", r.prompts_issued},
                {"parse_warnings", r.parse_warnings},
                {"degraded", r.degraded},
                {"prompt_tokens", r.prompt_tokens},
                {"completion_tokens", r.completion_tokens}}
        .dump();
}

IntentStageResult intent_stage_from_json(const std::string& text) {
    json rec = json::parse(text);
    IntentStageResult r;
    for (const auto& ja : rec.at("annotations")) {
        IntentAnnotation a;
        a.target_seg = {ja.at("target_parent").get<std::string>(),
                        ja.at("target_index").get<int>()};
        a.context_seg = {ja.at("context_parent").get<std::string>(),
                         ja.at("context_index").get<int>()};
        a.flagged = ja.at("flagged").get<bool>();
        a.intent_text = ja.at("intent").get<std::string>();
        a.raw_response_id = ja.value("response_id", "");
        r.annotations.push_back(std::move(a));
    }
    r.prompts_issued = rec.value("prompts_issued", 0);
    r.parse_warnings = rec.value("parse_warnings", 0);
    r.degraded = rec.value("degraded", false);
    r.prompt_tokens = rec.value("prompt_tokens", 0);
    r.completion_tokens = rec.value("completion_tokens", 0);
    return r;
}

}  // namespace omidet
