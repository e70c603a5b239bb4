#pragma once

// Omission-aware graph assembly.
//
// A graph holds one target item plus its contextual environment: every
// content segment becomes a node, nodes within one source item are fully
// connected by directed intra-source edges, and inter-source edges are
// added later by relation modeling (they carry an omission-intent text and
// its embedding). Node embeddings are the raw encoder vectors; the
// trainable projection to model width happens inside the network so graphs
// stay reusable across model configurations.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "omidet/corpus.hpp"
#include "omidet/encoder.hpp"
#include "omidet/math.hpp"

namespace omidet {

enum class NodeSource { Target, Context };

std::string node_source_name(NodeSource s);
NodeSource node_source_from_name(const std::string& name);

enum class EdgeType { Intra, Inter };

std::string edge_type_name(EdgeType t);
EdgeType edge_type_from_name(const std::string& name);

struct GraphNode {
    int node_id = 0;
    NodeSource source = NodeSource::Target;
    std::string parent_id;
    int segment_index = 0;
    std::string text;
    Vec embedding;  // raw encoder vector, dim d_enc
};

struct GraphEdge {
    int src = 0;
    int dst = 0;
    EdgeType etype = EdgeType::Intra;
    // Inter edges only: the inferred omission intent and its raw encoder
    // embedding. Both directions of a flagged pair share the same values.
    std::string intent_text;
    Vec intent_embedding;
};

struct OmissionGraph {
    std::string target_id;
    std::optional<int> label;
    std::optional<Split> split;
    std::vector<GraphNode> nodes;
    std::vector<GraphEdge> edges;
    std::vector<int> target_node_ids;
    // Filled by the network after a forward pass (final root representation);
    // empty until then.
    Vec root_state;
    // Relation-modeling bookkeeping.
    bool degraded = false;       // remote annotator failed; neutral edges used
    int parse_warnings = 0;      // unparseable or unmatched annotator output

    int inter_edge_count() const;
    int intra_edge_count() const;
};

struct GraphStats {
    int node_count = 0;
    int intra_count = 0;
    int inter_count = 0;
    double target_fraction = 0.0;
};

// Nodes from target segments plus all segments of each environment item,
// in environment rank order; directed intra edges between every ordered
// pair within one item; no inter edges yet. Throws if the target has no
// segments.
OmissionGraph build_graph(const NewsItem& target, const ContextEnvironment& env,
                          SegmentStore& segments, const TextEncoder& encoder,
                          const Corpus& context_corpus);

GraphStats graph_stats(const OmissionGraph& g);

// Checks structural invariants (dense ids, endpoint ranges, no self-loops,
// intra edges within one parent, inter edges bipartite target/context,
// target_node_ids exact). Throws std::runtime_error describing the first
// violation.
void validate_graph(const OmissionGraph& g);

// Node lookup by (parent_id, segment_index); -1 when absent.
int find_node(const OmissionGraph& g, const std::string& parent_id,
              int segment_index);

// JSON round-trip used by the workspace cache.
std::string graph_to_json(const OmissionGraph& g);
OmissionGraph graph_from_json(const std::string& text);

void save_graph(const OmissionGraph& g, const std::filesystem::path& path);
OmissionGraph load_graph(const std::filesystem::path& path);

}  // namespace omidet
