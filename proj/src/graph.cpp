#include "omidet/graph.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace omidet {

using nlohmann::json;

std::string node_source_name(NodeSource s) {
    return s == NodeSource::Target ? "target" : "context";
}

NodeSource node_source_from_name(const std::string& name) {
    if (name == "target") return NodeSource::Target;
    if (name == "context") return NodeSource::Context;
    throw std::invalid_argument("unknown node source '" + name + "'");
}

std::string edge_type_name(EdgeType t) {
    return t == EdgeType::Intra ? "intra" : "inter";
}

EdgeType edge_type_from_name(const std::string& name) {
    if (name == "intra") return EdgeType::Intra;
    if (name == "inter") return EdgeType::Inter;
    throw std::invalid_argument("unknown edge type '" + name + "'");
}

int OmissionGraph::inter_edge_count() const {
    int n = 0;
    for (const auto& e : edges) n += (e.etype == EdgeType::Inter) ? 1 : 0;
    return n;
}

int OmissionGraph::intra_edge_count() const {
    int n = 0;
    for (const auto& e : edges) n += (e.etype == EdgeType::Intra) ? 1 : 0;
    return n;
}

namespace {

// Appends one item's segments as nodes and its full directed intra clique.
void append_item(OmissionGraph& g, const NewsItem& item, NodeSource source,
                 SegmentStore& segments, const TextEncoder& encoder) {
    const auto& segs = segments.segments(item);
    const int first = static_cast<int>(g.nodes.size());
    for (const auto& seg : segs) {
        GraphNode node;
        node.node_id = static_cast<int>(g.nodes.size());
        node.source = source;
        node.parent_id = item.id;
        node.segment_index = seg.index;
        node.text = seg.text;
        node.embedding = encoder.encode(seg.text);
        if (source == NodeSource::Target) {
            g.target_node_ids.push_back(node.node_id);
        }
        g.nodes.push_back(std::move(node));
    }
    const int last = static_cast<int>(g.nodes.size());
    for (int i = first; i < last; ++i) {
        for (int j = first; j < last; ++j) {
            if (i == j) continue;
            GraphEdge e;
            e.src = i;
            e.dst = j;
            e.etype = EdgeType::Intra;
            g.edges.push_back(std::move(e));
        }
    }
}

}  // namespace

OmissionGraph build_graph(const NewsItem& target, const ContextEnvironment& env,
                          SegmentStore& segments, const TextEncoder& encoder,
                          const Corpus& context_corpus) {
    OmissionGraph g;
    g.target_id = target.id;
    g.label = target.label;
    g.split = target.split;
    append_item(g, target, NodeSource::Target, segments, encoder);
    if (g.target_node_ids.empty()) {
        throw std::runtime_error("build_graph: target '" + target.id +
                                 "' has no segments");
    }
    for (const auto& [id, sim] : env.ranked) {
        (void)sim;
        append_item(g, context_corpus.get(id), NodeSource::Context, segments,
                    encoder);
    }
    return g;
}

GraphStats graph_stats(const OmissionGraph& g) {
    GraphStats s;
    s.node_count = static_cast<int>(g.nodes.size());
    s.intra_count = g.intra_edge_count();
    s.inter_count = g.inter_edge_count();
    s.target_fraction =
        g.nodes.empty()
            ? 0.0
            : static_cast<double>(g.target_node_ids.size()) / g.nodes.size();
    return s;
}

void validate_graph(const OmissionGraph& g) {
    const int n = static_cast<int>(g.nodes.size());
    for (int i = 0; i < n; ++i) {
        if (g.nodes[i].node_id != i) {
            throw std::runtime_error("graph '" + g.target_id +
                                     "': node ids not dense at position " +
                                     std::to_string(i));
        }
    }
    std::unordered_set<int> target_ids(g.target_node_ids.begin(),
                                       g.target_node_ids.end());
    for (const auto& node : g.nodes) {
        const bool is_target = node.source == NodeSource::Target;
        if (is_target != (target_ids.count(node.node_id) > 0)) {
            throw std::runtime_error("graph '" + g.target_id +
                                     "': target_node_ids disagree with node " +
                                     std::to_string(node.node_id));
        }
    }
    if (target_ids.empty()) {
        throw std::runtime_error("graph '" + g.target_id + "': no target nodes");
    }
    for (const auto& e : g.edges) {
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
            throw std::runtime_error("graph '" + g.target_id +
                                     "': edge endpoint out of range");
        }
        if (e.src == e.dst) {
            throw std::runtime_error("graph '" + g.target_id + "': self-loop at " +
                                     std::to_string(e.src));
        }
        const auto& a = g.nodes[e.src];
        const auto& b = g.nodes[e.dst];
        if (e.etype == EdgeType::Intra) {
            if (a.parent_id != b.parent_id) {
                throw std::runtime_error("graph '" + g.target_id +
                                         "': intra edge crosses items");
            }
        } else {
            const bool bipartite = (a.source == NodeSource::Target) !=
                                   (b.source == NodeSource::Target);
            if (!bipartite) {
                throw std::runtime_error("graph '" + g.target_id +
                                         "': inter edge is not target<->context");
            }
        }
    }
}

int find_node(const OmissionGraph& g, const std::string& parent_id,
              int segment_index) {
    for (const auto& node : g.nodes) {
        if (node.parent_id == parent_id && node.segment_index == segment_index) {
            return node.node_id;
        }
    }
    return -1;
}

namespace {

json vec_to_json(const Vec& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vec vec_from_json(const json& arr) {
    Vec v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = arr[i].get<Scalar>();
    }
    return v;
}

}  // namespace

std::string graph_to_json(const OmissionGraph& g) {
    json rec;
    rec["target_id"] = g.target_id;
    rec["label"] = g.label ? json(*g.label) : json(nullptr);
    rec["split"] = g.split ? json(split_name(*g.split)) : json(nullptr);
    rec["degraded"] = g.degraded;
    rec["parse_warnings"] = g.parse_warnings;
    rec["target_node_ids"] = g.target_node_ids;
    json nodes = json::array();
    for (const auto& node : g.nodes) {
        nodes.push_back({{"id", node.node_id},
                         {"source", node_source_name(node.source)},
                         {"parent", node.parent_id},
                         {"seg", node.segment_index},
                         {"text", node.text},
                         {"emb", vec_to_json(node.embedding)}});
    }
    rec["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const auto& e : g.edges) {
        json je{{"src", e.src}, {"dst", e.dst}, {"etype", edge_type_name(e.etype)}};
        if (e.etype == EdgeType::Inter) {
            je["intent"] = e.intent_text;
            je["attr"] = vec_to_json(e.intent_embedding);
        }
        edges.push_back(std::move(je));
    }
    rec["edges"] = std::move(edges);
    return rec.dump();
}

OmissionGraph graph_from_json(const std::string& text) {
    json rec = json::parse(text);
    OmissionGraph g;
    g.target_id = rec.at("target_id").get<std::string>();
    if (!rec.at("label").is_null()) g.label = rec["label"].get<int>();
    if (!rec.at("split").is_null()) {
        g.split = split_from_name(rec["split"].get<std::string>());
    }
    g.degraded = rec.value("degraded", false);
    g.parse_warnings = rec.value("parse_warnings", 0);
    g.target_node_ids = rec.at("target_node_ids").get<std::vector<int>>();
    for (const auto& jn : rec.at("nodes")) {
        GraphNode node;
        node.node_id = jn.at("id").get<int>();
        node.source = node_source_from_name(jn.at("source").get<std::string>());
        node.parent_id = jn.at("parent").get<std::string>();
        node.segment_index = jn.at("seg").get<int>();
        node.text = jn.at("text").get<std::string>();
        node.embedding = vec_from_json(jn.at("emb"));
        g.nodes.push_back(std::move(node));
    }
    for (const auto& je : rec.at("edges")) {
        GraphEdge e;
        e.src = je.at("src").get<int>();
        e.dst = je.at("dst").get<int>();
        e.etype = edge_type_from_name(je.at("etype").get<std::string>());
        if (e.etype == EdgeType::Inter) {
            e.intent_text = je.at("intent").get<std::string>();
            e.intent_embedding = vec_from_json(je.at("attr"));
        }
        g.edges.push_back(std::move(e));
    }
    validate_graph(g);
    return g;
}

void save_graph(const OmissionGraph& g, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write graph file " + path.string());
    }
    out << graph_to_json(g) << '\n';
}

OmissionGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read graph file " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return graph_from_json(text);
}

}  // namespace omidet
