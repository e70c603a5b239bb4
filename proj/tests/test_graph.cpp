#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "omidet/corpus.hpp"
#include "omidet/encoder.hpp"
#include "omidet/graph.hpp"
#include "testutil.hpp"

using namespace omidet;
using omidet::testsupport::TempDir;

namespace {

NewsItem item(std::string id, std::string text, std::int64_t ts = 0) {
    NewsItem n;
    n.id = std::move(id);
    n.text = std::move(text);
    n.timestamp = ts;
    return n;
}

struct Fixture {
    HashingEncoder encoder{64};
    SegmentStore segments{32};
    Corpus context;

    OmissionGraph build(const NewsItem& target,
                        const std::vector<std::string>& env_ids) {
        ContextEnvironment env;
        env.target_id = target.id;
        env.k = static_cast<int>(env_ids.size());
        for (const auto& id : env_ids) env.ranked.emplace_back(id, 0.5);
        return build_graph(target, env, segments, encoder, context);
    }
};

}  // namespace

TEST_CASE("two target segments and no context yield two nodes, two intra edges") {
    Fixture f;
    const OmissionGraph g = f.build(item("t", "First point. Second point."), {});
    CHECK(g.nodes.size() == 2);
    CHECK(g.intra_edge_count() == 2);
    CHECK(g.inter_edge_count() == 0);
    CHECK(g.target_node_ids == std::vector<int>{0, 1});
    validate_graph(g);
    const GraphStats st = graph_stats(g);
    CHECK(st.node_count == 2);
    CHECK(st.intra_count == 2);
    CHECK(st.inter_count == 0);
    CHECK(st.target_fraction == doctest::Approx(1.0));
}

TEST_CASE("ordered intra pairs count per source item") {
    Fixture f;
    f.context.add(item("c1", "Context one. Context two."));
    const OmissionGraph g =
        f.build(item("t", "Alpha. Beta. Gamma."), {"c1"});
    CHECK(g.nodes.size() == 5);
    // 3*2 within the target + 2*1 within the context item.
    CHECK(g.intra_edge_count() == 8);
    CHECK(g.inter_edge_count() == 0);
    CHECK(graph_stats(g).node_count == 5);
    CHECK(graph_stats(g).target_fraction == doctest::Approx(3.0 / 5.0));
    validate_graph(g);
}

TEST_CASE("intra edge endpoints always share a parent on random item sets") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 10; ++trial) {
        Fixture f;
        std::vector<std::string> env_ids;
        const int n_ctx = 1 + static_cast<int>(gen() % 4);
        for (int c = 0; c < n_ctx; ++c) {
            std::string text;
            const int segs = 1 + static_cast<int>(gen() % 4);
            for (int s = 0; s < segs; ++s) {
                text += "ctx" + std::to_string(trial) + "x" + std::to_string(c) +
                        "x" + std::to_string(s) + ". ";
            }
            const std::string id = "c" + std::to_string(c);
            f.context.add(item(id, text));
            env_ids.push_back(id);
        }
        std::string ttext;
        const int tsegs = 1 + static_cast<int>(gen() % 4);
        for (int s = 0; s < tsegs; ++s) ttext += "tgt" + std::to_string(s) + ". ";
        const OmissionGraph g = f.build(item("t", ttext), env_ids);
        validate_graph(g);

        // Exhaustive endpoint check plus per-item ordered-pair count.
        std::map<std::string, int> seg_count;
        for (const auto& n : g.nodes) seg_count[n.parent_id]++;
        std::map<std::string, int> intra_count;
        for (const auto& e : g.edges) {
            if (e.etype != EdgeType::Intra) continue;
            CHECK(g.nodes[e.src].parent_id == g.nodes[e.dst].parent_id);
            CHECK(e.src != e.dst);
            intra_count[g.nodes[e.src].parent_id]++;
        }
        for (const auto& [pid, s] : seg_count) {
            CHECK(intra_count[pid] == s * (s - 1));
        }

        // graph_stats equals a direct recount.
        const GraphStats st = graph_stats(g);
        int intra = 0, inter = 0, tgt = 0;
        for (const auto& e : g.edges) (e.etype == EdgeType::Intra ? intra : inter)++;
        for (const auto& n : g.nodes) tgt += n.source == NodeSource::Target ? 1 : 0;
        CHECK(st.node_count == static_cast<int>(g.nodes.size()));
        CHECK(st.intra_count == intra);
        CHECK(st.inter_count == inter);
        CHECK(st.target_fraction ==
              doctest::Approx(static_cast<double>(tgt) / g.nodes.size()));
    }
}

TEST_CASE("node ids are dense and target_node_ids exact") {
    Fixture f;
    f.context.add(item("c1", "One. Two."));
    f.context.add(item("c2", "Three."));
    const OmissionGraph g = f.build(item("t", "A. B."), {"c1", "c2"});
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        CHECK(g.nodes[i].node_id == static_cast<int>(i));
    }
    std::vector<int> want;
    for (const auto& n : g.nodes) {
        if (n.source == NodeSource::Target) want.push_back(n.node_id);
    }
    CHECK(g.target_node_ids == want);
    // Node embeddings carry the raw encoder vectors of their texts.
    for (const auto& n : g.nodes) {
        const Vec fresh = f.encoder.encode(n.text);
        CHECK((n.embedding.array() == fresh.array()).all());
    }
}

TEST_CASE("a degenerate whitespace-only target keeps one node") {
    // Segmentation never returns zero segments: unsplittable text becomes
    // a single catch-all segment, so the graph still has a target node.
    Fixture f;
    const OmissionGraph g = f.build(item("t", "   "), {});
    REQUIRE(g.nodes.size() == 1);
    CHECK(g.target_node_ids == std::vector<int>{0});
    CHECK(g.edges.empty());
    CHECK_NOTHROW(validate_graph(g));
}

TEST_CASE("validate_graph flags structural violations") {
    Fixture f;
    f.context.add(item("c1", "One. Two."));
    const OmissionGraph base = f.build(item("t", "A. B."), {"c1"});
    validate_graph(base);

    SUBCASE("self-loop") {
        OmissionGraph g = base;
        GraphEdge e;
        e.src = 0;
        e.dst = 0;
        e.etype = EdgeType::Intra;
        g.edges.push_back(e);
        CHECK_THROWS(validate_graph(g));
    }
    SUBCASE("intra edge across parents") {
        OmissionGraph g = base;
        GraphEdge e;
        e.src = 0;  // target node
        e.dst = 2;  // context node
        e.etype = EdgeType::Intra;
        g.edges.push_back(e);
        CHECK_THROWS(validate_graph(g));
    }
    SUBCASE("inter edge between two target nodes") {
        OmissionGraph g = base;
        GraphEdge e;
        e.src = 0;
        e.dst = 1;
        e.etype = EdgeType::Inter;
        e.intent_text = "x";
        e.intent_embedding = Vec::Ones(4);
        g.edges.push_back(e);
        CHECK_THROWS(validate_graph(g));
    }
    SUBCASE("edge endpoint out of range") {
        OmissionGraph g = base;
        GraphEdge e;
        e.src = 0;
        e.dst = 99;
        e.etype = EdgeType::Intra;
        g.edges.push_back(e);
        CHECK_THROWS(validate_graph(g));
    }
    SUBCASE("target_node_ids drifting from node sources") {
        OmissionGraph g = base;
        g.target_node_ids.pop_back();
        CHECK_THROWS(validate_graph(g));
    }
}

TEST_CASE("find_node locates segments by parent and index") {
    Fixture f;
    f.context.add(item("c1", "One. Two."));
    const OmissionGraph g = f.build(item("t", "A. B."), {"c1"});
    CHECK(find_node(g, "t", 0) == 0);
    CHECK(find_node(g, "t", 1) == 1);
    CHECK(find_node(g, "c1", 1) == 3);
    CHECK(find_node(g, "missing", 0) == -1);
    CHECK(find_node(g, "c1", 9) == -1);
}

TEST_CASE("graph JSON round-trip is bit-exact") {
    Fixture f;
    f.context.add(item("c1", "Context one. Context two."));
    OmissionGraph g = f.build(item("t", "Alpha. Beta."), {"c1"});
    g.label = 1;
    g.split = Split::Val;
    g.parse_warnings = 2;
    // Add an inter edge with an intent embedding so those fields round-trip.
    GraphEdge e;
    e.src = 0;
    e.dst = 2;
    e.etype = EdgeType::Inter;
    e.intent_text = "omits shared context token: alpha";
    e.intent_embedding = f.encoder.encode(e.intent_text);
    g.edges.push_back(e);
    GraphEdge back = e;
    std::swap(back.src, back.dst);
    g.edges.push_back(back);
    validate_graph(g);

    const OmissionGraph r = graph_from_json(graph_to_json(g));
    CHECK(r.target_id == g.target_id);
    CHECK(r.label == g.label);
    CHECK(r.split == g.split);
    CHECK(r.parse_warnings == g.parse_warnings);
    CHECK(r.degraded == g.degraded);
    REQUIRE(r.nodes.size() == g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        CHECK(r.nodes[i].node_id == g.nodes[i].node_id);
        CHECK(r.nodes[i].source == g.nodes[i].source);
        CHECK(r.nodes[i].parent_id == g.nodes[i].parent_id);
        CHECK(r.nodes[i].segment_index == g.nodes[i].segment_index);
        CHECK(r.nodes[i].text == g.nodes[i].text);
        CHECK((r.nodes[i].embedding.array() == g.nodes[i].embedding.array()).all());
    }
    REQUIRE(r.edges.size() == g.edges.size());
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        CHECK(r.edges[i].src == g.edges[i].src);
        CHECK(r.edges[i].dst == g.edges[i].dst);
        CHECK(r.edges[i].etype == g.edges[i].etype);
        CHECK(r.edges[i].intent_text == g.edges[i].intent_text);
        CHECK(r.edges[i].intent_embedding.size() ==
              g.edges[i].intent_embedding.size());
        if (g.edges[i].intent_embedding.size() > 0) {
            CHECK((r.edges[i].intent_embedding.array() ==
                   g.edges[i].intent_embedding.array())
                      .all());
        }
    }
    CHECK(r.target_node_ids == g.target_node_ids);
    validate_graph(r);
}

TEST_CASE("graphs save to and load from workspace files") {
    TempDir dir("graphio");
    Fixture f;
    f.context.add(item("c1", "One. Two."));
    OmissionGraph g = f.build(item("t", "A. B."), {"c1"});
    g.label = 0;
    g.split = Split::Test;
    const auto path = dir / "t.json";
    save_graph(g, path);
    const OmissionGraph r = load_graph(path);
    CHECK(r.target_id == "t");
    CHECK(r.nodes.size() == g.nodes.size());
    CHECK(r.edges.size() == g.edges.size());
    CHECK(r.label == 0);
    CHECK(r.split == Split::Test);
    CHECK_THROWS(load_graph(dir / "absent.json"));
}

TEST_CASE("edge and node enum names round-trip") {
    CHECK(edge_type_from_name(edge_type_name(EdgeType::Intra)) == EdgeType::Intra);
    CHECK(edge_type_from_name(edge_type_name(EdgeType::Inter)) == EdgeType::Inter);
    CHECK_THROWS(edge_type_from_name("loop"));
    CHECK(node_source_from_name(node_source_name(NodeSource::Target)) ==
          NodeSource::Target);
    CHECK(node_source_from_name(node_source_name(NodeSource::Context)) ==
          NodeSource::Context);
    CHECK_THROWS(node_source_from_name("virtual"));
}
