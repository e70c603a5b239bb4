#include "omidet/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "omidet/relations.hpp"
#include "omidet/text.hpp"

namespace omidet {

namespace {

bool is_no_omission_reply(const std::string& raw) {
    return raw.find("no omissions found") != std::string::npos;
}

std::string strip_omission_suffix(const std::string& name) {
    const std::string suffix = " Omission";
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        return name.substr(0, name.size() - suffix.size());
    }
    return name;
}

}  // namespace

SimulationResult simulate_environment(const std::vector<std::string>& target_segments,
                                      LlmClient& client,
                                      const std::string& model_name,
                                      SimMode mode) {
    if (target_segments.empty()) {
        throw std::invalid_argument("simulate_environment: no target segments");
    }
    SimulationResult result;
    const PromptPair prompt = render_sim_prompt(target_segments, mode);
    LlmRequest req{prompt.system, prompt.context, model_name};
    LlmResponse resp;
    try {
        resp = client.complete(req);
        result.prompts_issued = 1;
    } catch (const LlmError&) {
        result.degraded = true;
        return result;
    }
    result.prompt_tokens = resp.prompt_tokens;
    result.completion_tokens = resp.completion_tokens;

    const auto triples = extract_triples(resp.text);
    if (triples.empty()) {
        if (!is_no_omission_reply(resp.text)) result.parse_warnings++;
        return result;
    }
    const std::string response_id = ResponseCache::key_for(req);
    for (const auto& t : triples) {
        // Simulation triple roles: omitted information, intent, target
        // segment (the first field is novel text, never matched).
        const int tgt = match_segment(t.target_text, target_segments);
        if (tgt < 0 || t.env_text.empty() || t.intent_text.empty()) {
            result.parse_warnings++;
            continue;
        }
        SimulatedSegment seg;
        seg.target_index = tgt;
        seg.target_text = target_segments[static_cast<std::size_t>(tgt)];
        seg.omitted_text = t.env_text;
        seg.intent_text = t.intent_text;
        seg.mode = mode;
        seg.raw_response_id = response_id;
        result.segments.push_back(std::move(seg));
    }
    return result;
}

void apply_simulation(OmissionGraph& g, const SimulationResult& sim,
                      const TextEncoder& encoder) {
    if (sim.segments.empty()) return;
    const std::string parent = g.target_id + "#sim";
    const int first_id = static_cast<int>(g.nodes.size());

    for (std::size_t i = 0; i < sim.segments.size(); ++i) {
        const auto& s = sim.segments[i];
        GraphNode node;
        node.node_id = first_id + static_cast<int>(i);
        node.source = NodeSource::Context;
        node.parent_id = parent;
        node.segment_index = static_cast<int>(i);
        node.text = s.omitted_text;
        node.embedding = encoder.encode(s.omitted_text);
        g.nodes.push_back(std::move(node));
    }
    // The simulated segments form one context item: full directed clique.
    for (std::size_t i = 0; i < sim.segments.size(); ++i) {
        for (std::size_t j = 0; j < sim.segments.size(); ++j) {
            if (i == j) continue;
            GraphEdge e;
            e.src = first_id + static_cast<int>(i);
            e.dst = first_id + static_cast<int>(j);
            e.etype = EdgeType::Intra;
            g.edges.push_back(std::move(e));
        }
    }
    for (std::size_t i = 0; i < sim.segments.size(); ++i) {
        const auto& s = sim.segments[i];
        const int sim_node = first_id + static_cast<int>(i);
        const int tgt_node =
            g.target_node_ids.at(static_cast<std::size_t>(s.target_index));
        const Vec intent_emb = encoder.encode(s.intent_text);
        for (const auto& [src, dst] :
             {std::pair{tgt_node, sim_node}, std::pair{sim_node, tgt_node}}) {
            GraphEdge e;
            e.src = src;
            e.dst = dst;
            e.etype = EdgeType::Inter;
            e.intent_text = s.intent_text;
            e.intent_embedding = intent_emb;
            g.edges.push_back(std::move(e));
        }
    }
    validate_graph(g);
}

std::string format_type_sample(const TypeSample& s) {
    return "{[\"" + s.omitted + "\"], [" + s.intent + "], [\"" + s.segment +
           "\"]}";
}

std::vector<OmissionType> parse_type_lines(const std::string& raw) {
    std::vector<OmissionType> out;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        const std::size_t open = raw.find('[', pos);
        if (open == std::string::npos) break;
        const std::size_t close = raw.find(']', open + 1);
        if (close == std::string::npos) break;
        const std::string body = raw.substr(open + 1, close - open - 1);
        const std::size_t comma = body.find(',');
        if (comma != std::string::npos && comma > 0) {
            OmissionType t;
            t.name = strip_omission_suffix(trim(body.substr(0, comma)));
            t.definition = trim(body.substr(comma + 1));
            if (!t.name.empty() && !t.definition.empty()) {
                out.push_back(std::move(t));
            }
        }
        pos = close + 1;
    }
    return out;
}

TypeAnalysisResult categorize_batches(const std::vector<TypeSample>& samples,
                                      int batch_size, LlmClient& client,
                                      const std::string& model_name) {
    if (batch_size < 1) {
        throw std::invalid_argument("categorize_batches: batch_size must be >= 1");
    }
    if (samples.empty()) {
        throw std::invalid_argument("categorize_batches: no samples");
    }
    TypeAnalysisResult result;
    std::size_t pos = 0;
    while (pos < samples.size()) {
        const std::size_t end =
            std::min(samples.size(), pos + static_cast<std::size_t>(batch_size));
        std::vector<std::string> lines;
        for (std::size_t i = pos; i < end; ++i) {
            lines.push_back(format_type_sample(samples[i]));
        }
        const PromptPair prompt = render_batch_type_prompt(lines);
        const LlmResponse resp =
            client.complete({prompt.system, prompt.context, model_name});
        result.batches++;
        result.prompt_tokens += resp.prompt_tokens;
        result.completion_tokens += resp.completion_tokens;
        auto types = parse_type_lines(resp.text);
        if (types.empty()) {
            result.parse_warnings++;
        } else {
            result.batch_types.push_back(std::move(types));
        }
        pos = end;
    }
    return result;
}

std::vector<OmissionType> consolidate_types(
    const std::vector<std::vector<OmissionType>>& batch_types, LlmClient& client,
    const std::string& model_name, TypeAnalysisResult* stats) {
    if (batch_types.empty()) {
        throw std::invalid_argument("consolidate_types: no batch lists");
    }
    std::vector<std::string> lines;
    for (const auto& batch : batch_types) {
        for (const auto& t : batch) lines.push_back(t.as_line());
    }
    const PromptPair prompt = render_consolidate_prompt(lines);
    const LlmResponse resp =
        client.complete({prompt.system, prompt.context, model_name});
    if (stats) {
        stats->prompt_tokens += resp.prompt_tokens;
        stats->completion_tokens += resp.completion_tokens;
    }
    std::vector<OmissionType> merged;
    std::set<std::string> seen;
    for (auto& t : parse_type_lines(resp.text)) {
        if (seen.insert(t.name).second) merged.push_back(std::move(t));
    }
    if (merged.size() < 5 || merged.size() > 8) {
        if (stats) stats->count_out_of_range = true;
    }
    return merged;
}

TypeAnalysisResult analyze_types(const std::vector<TypeSample>& samples,
                                 int batch_size, LlmClient& client,
                                 const std::string& model_name) {
    TypeAnalysisResult result =
        categorize_batches(samples, batch_size, client, model_name);
    if (result.batch_types.empty()) {
        throw std::runtime_error("analyze_types: every batch was unparseable");
    }
    result.final_types =
        consolidate_types(result.batch_types, client, model_name, &result);
    return result;
}

int assign_type(const TypeSample& sample, const std::vector<OmissionType>& types) {
    if (types.empty()) {
        throw std::invalid_argument("assign_type: no types");
    }
    const std::string text = sample.intent + " " + sample.omitted;
    int best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < types.size(); ++i) {
        const std::string key = types[i].display_name() + " " + types[i].definition;
        const double score = token_jaccard(text, key);
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::string z_axis_name(ZAxis axis) {
    return axis == ZAxis::AcrossTypes ? "across-types" : "across-classes";
}

ZAxis z_axis_from_name(const std::string& name) {
    if (name == "across-types") return ZAxis::AcrossTypes;
    if (name == "across-classes") return ZAxis::AcrossClasses;
    throw std::invalid_argument("unknown z axis '" + name + "'");
}

TypeDistribution type_distribution(
    const std::vector<std::pair<int, std::string>>& assignments,
    const std::vector<std::string>& type_order, ZAxis axis) {
    if (type_order.empty()) {
        throw std::invalid_argument("type_distribution: no types");
    }
    TypeDistribution dist;
    dist.type_order = type_order;
    dist.axis = axis;

    const std::size_t n_types = type_order.size();
    std::vector<std::vector<std::int64_t>> counts(
        2, std::vector<std::int64_t>(n_types, 0));
    std::vector<std::int64_t> class_totals(2, 0);
    for (const auto& [cls, type] : assignments) {
        if (cls != 0 && cls != 1) {
            throw std::invalid_argument("type_distribution: class must be 0 or 1");
        }
        const auto it = std::find(type_order.begin(), type_order.end(), type);
        if (it == type_order.end()) {
            throw std::invalid_argument("type_distribution: unknown type '" +
                                        type + "'");
        }
        counts[static_cast<std::size_t>(cls)]
              [static_cast<std::size_t>(it - type_order.begin())]++;
        class_totals[static_cast<std::size_t>(cls)]++;
    }

    // Standardize counts along the chosen axis with population sigma.
    auto z_scores = [&](const std::vector<std::int64_t>& xs) {
        std::vector<Scalar> z(xs.size(), 0);
        Scalar mu = 0;
        for (auto x : xs) mu += static_cast<Scalar>(x);
        mu /= static_cast<Scalar>(xs.size());
        Scalar var = 0;
        for (auto x : xs) {
            var += (static_cast<Scalar>(x) - mu) * (static_cast<Scalar>(x) - mu);
        }
        var /= static_cast<Scalar>(xs.size());
        if (var <= 0) {
            dist.zero_variance = true;
            return z;
        }
        const Scalar sigma = std::sqrt(var);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            z[i] = (static_cast<Scalar>(xs[i]) - mu) / sigma;
        }
        return z;
    };

    std::vector<std::vector<Scalar>> z(2, std::vector<Scalar>(n_types, 0));
    if (axis == ZAxis::AcrossTypes) {
        for (int cls = 0; cls < 2; ++cls) {
            z[static_cast<std::size_t>(cls)] =
                z_scores(counts[static_cast<std::size_t>(cls)]);
        }
    } else {
        for (std::size_t t = 0; t < n_types; ++t) {
            const auto zt = z_scores({counts[0][t], counts[1][t]});
            z[0][t] = zt[0];
            z[1][t] = zt[1];
        }
    }

    for (int cls = 0; cls < 2; ++cls) {
        for (std::size_t t = 0; t < n_types; ++t) {
            TypeCell cell;
            cell.cls = cls;
            cell.type = type_order[t];
            cell.count = counts[static_cast<std::size_t>(cls)][t];
            cell.rate = class_totals[static_cast<std::size_t>(cls)] > 0
                            ? static_cast<Scalar>(cell.count) /
                                  static_cast<Scalar>(
                                      class_totals[static_cast<std::size_t>(cls)])
                            : 0;
            cell.z = z[static_cast<std::size_t>(cls)][t];
            dist.cells.push_back(std::move(cell));
        }
    }
    return dist;
}

std::string TypeDistribution::to_csv() const {
    std::ostringstream out;
    out << "class,type,count,rate,z\n";
    for (const auto& c : cells) {
        out << (c.cls == 0 ? "real" : "fake") << ',' << c.type << ',' << c.count
            << ',' << nlohmann::json(c.rate).dump() << ','
            << nlohmann::json(c.z).dump() << '\n';
    }
    return out.str();
}

std::string TypeDistribution::to_json() const {
    nlohmann::json j;
    j["axis"] = z_axis_name(axis);
    j["zero_variance"] = zero_variance;
    j["types"] = type_order;
    j["cells"] = nlohmann::json::array();
    for (const auto& c : cells) {
        j["cells"].push_back({{"class", c.cls},
                              {"type", c.type},
                              {"count", c.count},
                              {"rate", c.rate},
                              {"z", c.z}});
    }
    return j.dump(2);
}

}  // namespace omidet
