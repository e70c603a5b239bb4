#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "omidet/corpus.hpp"
#include "omidet/graph.hpp"
#include "omidet/simulate.hpp"
#include "omidet/taxonomy.hpp"

using namespace omidet;

namespace {

// Replies with a fixed string regardless of the prompt.
struct FixedClient : LlmClient {
    std::string reply;
    explicit FixedClient(std::string r) : reply(std::move(r)) {}
    LlmResponse complete(const LlmRequest&) override { return {reply, 10, 5}; }
    std::string kind() const override { return "fixed"; }
};

struct FailingClient : LlmClient {
    LlmResponse complete(const LlmRequest&) override {
        throw LlmError("annotator down");
    }
    std::string kind() const override { return "failing"; }
};

const std::vector<std::string> kSegments = {"The measure passed today.",
                                            "Critics were not quoted."};

OmissionGraph target_only_graph(const TextEncoder& encoder, SegmentStore& store) {
    NewsItem target;
    target.id = "t";
    target.text = kSegments[0] + " " + kSegments[1];
    ContextEnvironment env;
    env.target_id = target.id;
    const Corpus empty;
    return build_graph(target, env, store, encoder, empty);
}

}  // namespace

TEST_CASE("simulation prompts carry the mode-dependent guidance") {
    const PromptPair zero = render_sim_prompt(kSegments, SimMode::Zero);
    const PromptPair rule = render_sim_prompt(kSegments, SimMode::Rule);

    for (const PromptPair* p : {&zero, &rule}) {
        CHECK(p->system.find("generate omitted information") != std::string::npos);
        CHECK(p->system.find("Output format: {[Potential omitted information], "
                             "[omission intent], [Target segment]}") !=
              std::string::npos);
        CHECK(p->context.find("[The Start of Target Segments]") !=
              std::string::npos);
        CHECK(p->context.find("[The End of Target Segments]") != std::string::npos);
        CHECK(p->context.find("\"The measure passed today.\"") != std::string::npos);
    }
    CHECK(rule.system.find("[Contextual Omission] omitting background information") !=
          std::string::npos);
    // Mode gating: the zero-shot prompt mentions no canonical type at all.
    for (const OmissionType& t : canonical_omission_types()) {
        CHECK(zero.system.find(t.display_name()) == std::string::npos);
        CHECK(zero.context.find(t.display_name()) == std::string::npos);
        CHECK(zero.system.find("[" + t.name + "]") == std::string::npos);
    }

    // Byte-stable rendering.
    const PromptPair again = render_sim_prompt(kSegments, SimMode::Rule);
    CHECK(again.system == rule.system);
    CHECK(again.context == rule.context);

    CHECK(sim_mode_from_name(sim_mode_name(SimMode::Zero)) == SimMode::Zero);
    CHECK(sim_mode_from_name(sim_mode_name(SimMode::Rule)) == SimMode::Rule);
    CHECK_THROWS(sim_mode_from_name("few-shot"));
}

TEST_CASE("the stub simulates one segment zero-shot and two under guidance") {
    StubLlmClient stub;

    const SimulationResult zero =
        simulate_environment(kSegments, stub, "m", SimMode::Zero);
    CHECK(zero.prompts_issued == 1);
    CHECK(zero.parse_warnings == 0);
    CHECK_FALSE(zero.degraded);
    REQUIRE(zero.segments.size() == 1);
    CHECK(zero.segments[0].target_index == 0);
    CHECK(zero.segments[0].target_text == kSegments[0]);
    CHECK(zero.segments[0].omitted_text.rfind("unstated background regarding", 0) ==
          0);
    CHECK(zero.segments[0].mode == SimMode::Zero);
    CHECK_FALSE(zero.segments[0].raw_response_id.empty());
    CHECK(zero.prompt_tokens > 0);
    CHECK(zero.completion_tokens > 0);

    const SimulationResult rule =
        simulate_environment(kSegments, stub, "m", SimMode::Rule);
    REQUIRE(rule.segments.size() == 2);
    CHECK(rule.segments.size() >= zero.segments.size());
    CHECK(rule.segments[1].target_index == 1);
    CHECK(rule.segments[1].intent_text.find("[Comparative Omission]") !=
          std::string::npos);
    CHECK(rule.segments[0].intent_text.find("[Contextual Omission]") !=
          std::string::npos);
    CHECK(rule.segments[0].mode == SimMode::Rule);

    CHECK_THROWS(simulate_environment({}, stub, "m", SimMode::Zero));
}

TEST_CASE("applying a simulation grafts one synthetic context item") {
    HashingEncoder encoder(32);
    SegmentStore store(32);
    OmissionGraph g = target_only_graph(encoder, store);
    REQUIRE(g.nodes.size() == 2);
    const GraphStats before = graph_stats(g);

    StubLlmClient stub;
    const SimulationResult sim =
        simulate_environment(kSegments, stub, "m", SimMode::Rule);
    REQUIRE(sim.segments.size() == 2);
    apply_simulation(g, sim, encoder);

    CHECK(g.nodes.size() == 4);
    const GraphStats after = graph_stats(g);
    CHECK(after.intra_count == before.intra_count + 2);  // 2-node clique
    CHECK(after.inter_count == before.inter_count + 4);  // 2 per simulated node
    CHECK_NOTHROW(validate_graph(g));

    for (std::size_t i = 2; i < 4; ++i) {
        const GraphNode& n = g.nodes[i];
        CHECK(n.source == NodeSource::Context);
        CHECK(n.parent_id == "t#sim");
        CHECK(n.text == sim.segments[i - 2].omitted_text);
        const Vec fresh = encoder.encode(n.text);
        CHECK((n.embedding - fresh).cwiseAbs().maxCoeff() == 0.0);
    }
    int inter_with_intent = 0;
    for (const auto& e : g.edges) {
        if (e.etype != EdgeType::Inter) continue;
        ++inter_with_intent;
        REQUIRE(e.intent_embedding.size() > 0);
        CHECK_FALSE(e.intent_text.empty());
        const Vec fresh = encoder.encode(e.intent_text);
        CHECK((e.intent_embedding - fresh).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(inter_with_intent == 4);

    SUBCASE("an empty simulation is a no-op") {
        OmissionGraph g2 = target_only_graph(encoder, store);
        apply_simulation(g2, SimulationResult{}, encoder);
        CHECK(g2.nodes.size() == 2);
        CHECK(g2.edges.size() == 2);
    }
}

TEST_CASE("bad simulation replies are counted, failures degrade") {
    SUBCASE("garbage reply") {
        FixedClient garbage("complete nonsense without any braces");
        const SimulationResult r =
            simulate_environment(kSegments, garbage, "m", SimMode::Zero);
        CHECK(r.segments.empty());
        CHECK(r.parse_warnings == 1);
        CHECK_FALSE(r.degraded);
    }
    SUBCASE("explicit no-omission reply is clean") {
        FixedClient none("no omissions found");
        const SimulationResult r =
            simulate_environment(kSegments, none, "m", SimMode::Zero);
        CHECK(r.segments.empty());
        CHECK(r.parse_warnings == 0);
    }
    SUBCASE("triple with an unmatchable target is dropped") {
        FixedClient off(
            "{[\"something left out\"], [to mislead], [\"entirely unrelated "
            "sentence\"]}");
        const SimulationResult r =
            simulate_environment(kSegments, off, "m", SimMode::Zero);
        CHECK(r.segments.empty());
        CHECK(r.parse_warnings == 1);
    }
    SUBCASE("annotator failure flags degraded") {
        FailingClient down;
        const SimulationResult r =
            simulate_environment(kSegments, down, "m", SimMode::Zero);
        CHECK(r.degraded);
        CHECK(r.prompts_issued == 0);
        CHECK(r.segments.empty());
    }
}

TEST_CASE("type sample lines format and parse back") {
    const TypeSample s{"the segment", "to hide scale", "prior totals"};
    CHECK(format_type_sample(s) ==
          "{[\"prior totals\"], [to hide scale], [\"the segment\"]}");

    SUBCASE("display suffix folds back into the short name") {
        for (const auto& t : canonical_omission_types()) {
            const auto parsed = parse_type_lines(t.as_line());
            REQUIRE(parsed.size() == 1);
            CHECK(parsed[0].name == t.name);
            CHECK(parsed[0].definition == t.definition);
        }
    }
    SUBCASE("multi-line lists parse in order") {
        const auto types = parse_type_lines(
            "[Contextual Omission, keeps background out]\n"
            "[Fresh Category, something new]");
        REQUIRE(types.size() == 2);
        CHECK(types[0].name == "Contextual");
        CHECK(types[0].definition == "keeps background out");
        CHECK(types[1].name == "Fresh Category");
    }
    SUBCASE("unusable text yields nothing") {
        CHECK(parse_type_lines("").empty());
        CHECK(parse_type_lines("no brackets at all").empty());
        CHECK(parse_type_lines("[,]").empty());
        CHECK(parse_type_lines("[only a name]").empty());
    }
}

TEST_CASE("canonical type names are recognized in both forms") {
    std::string canon;
    CHECK(is_canonical_type("Contextual", &canon));
    CHECK(canon == "Contextual");
    CHECK(is_canonical_type("Contextual Omission", &canon));
    CHECK(canon == "Contextual");
    CHECK_FALSE(is_canonical_type("Invented", nullptr));
    CHECK(canonical_omission_types().size() == 8);
}

TEST_CASE("batch categorization splits samples and collects fixed stub types") {
    std::vector<TypeSample> samples;
    for (int i = 0; i < 50; ++i) {
        samples.push_back({"segment " + std::to_string(i), "to mislead",
                           "missing fact " + std::to_string(i)});
    }
    StubLlmClient stub;
    const TypeAnalysisResult r = categorize_batches(samples, 25, stub, "m");
    CHECK(r.batches == 2);
    CHECK(stub.stats().logical_calls == 2);
    CHECK(r.parse_warnings == 0);
    REQUIRE(r.batch_types.size() == 2);
    for (const auto& batch : r.batch_types) {
        REQUIRE(batch.size() == 2);
        CHECK(batch[0].name == "Numerical Comparison");
        CHECK(batch[1].name == "Background Information");
    }
    CHECK(r.prompt_tokens > 0);
    CHECK(r.completion_tokens > 0);

    SUBCASE("short last batch still issues a call") {
        StubLlmClient stub2;
        const TypeAnalysisResult r2 = categorize_batches(samples, 30, stub2, "m");
        CHECK(r2.batches == 2);  // 30 + 20
    }
    SUBCASE("an unparseable batch is skipped with a warning, not fatal") {
        // First call garbage, later calls valid: exactly one batch drops.
        struct FlakyClient : LlmClient {
            int calls = 0;
            LlmResponse complete(const LlmRequest&) override {
                ++calls;
                if (calls == 1) return {"no list here", 3, 1};
                return {"[Impact Omission, blunts consequences]", 3, 1};
            }
            std::string kind() const override { return "flaky"; }
        } flaky;
        const TypeAnalysisResult r3 = categorize_batches(samples, 25, flaky, "m");
        CHECK(r3.batches == 2);
        CHECK(r3.parse_warnings == 1);
        REQUIRE(r3.batch_types.size() == 1);
        REQUIRE(r3.batch_types[0].size() == 1);
        CHECK(r3.batch_types[0][0].name == "Impact");
    }
    SUBCASE("invalid arguments are rejected") {
        CHECK_THROWS(categorize_batches(samples, 0, stub, "m"));
        CHECK_THROWS(categorize_batches({}, 10, stub, "m"));
    }
}

TEST_CASE("consolidation merges to the canonical eight and dedupes") {
    StubLlmClient stub;
    std::vector<std::vector<OmissionType>> batches = {
        {{"Numerical Comparison", "omits comparative data"}},
        {{"Background Information", "omits background"}}};
    TypeAnalysisResult stats;
    const auto merged = consolidate_types(batches, stub, "m", &stats);
    REQUIRE(merged.size() == 8);
    const auto& canon = canonical_omission_types();
    for (std::size_t i = 0; i < merged.size(); ++i) {
        CHECK(merged[i].name == canon[i].name);
        CHECK(merged[i].definition == canon[i].definition);
    }
    CHECK_FALSE(stats.count_out_of_range);

    SUBCASE("idempotent under re-consolidation") {
        const auto again = consolidate_types({merged}, stub, "m");
        REQUIRE(again.size() == merged.size());
        for (std::size_t i = 0; i < again.size(); ++i) {
            CHECK(again[i].name == merged[i].name);
        }
    }
    SUBCASE("duplicate names keep the first definition and flag short lists") {
        FixedClient dup(
            "[Contextual Omission, first definition]\n"
            "[Contextual Omission, second definition]\n"
            "[Impact Omission, blunts consequences]");
        TypeAnalysisResult st;
        const auto out = consolidate_types(batches, dup, "m", &st);
        REQUIRE(out.size() == 2);
        CHECK(out[0].name == "Contextual");
        CHECK(out[0].definition == "first definition");
        CHECK(out[1].name == "Impact");
        CHECK(st.count_out_of_range);  // 2 lies outside 5..8
    }
    SUBCASE("no batches is an error") {
        CHECK_THROWS(consolidate_types({}, stub, "m"));
    }
}

TEST_CASE("the full type analysis runs batches then consolidation") {
    std::vector<TypeSample> samples;
    for (int i = 0; i < 10; ++i) {
        samples.push_back({"seg " + std::to_string(i), "to obscure figures",
                           "totals " + std::to_string(i)});
    }
    StubLlmClient stub;
    const TypeAnalysisResult r = analyze_types(samples, 4, stub, "m");
    CHECK(r.batches == 3);  // 4 + 4 + 2
    CHECK(r.final_types.size() == 8);
    CHECK(r.parse_warnings == 0);
    CHECK_FALSE(r.count_out_of_range);

    SUBCASE("all-garbage batches abort the analysis") {
        FixedClient garbage("???");
        CHECK_THROWS_AS(analyze_types(samples, 4, garbage, "m"),
                        std::runtime_error);
    }
}

TEST_CASE("type assignment picks the highest token overlap") {
    const std::vector<OmissionType> types = {
        {"Alpha", "unique alpha words"},
        {"Beta", "different beta tokens"},
    };
    CHECK(assign_type({"s", "unique alpha words", "x"}, types) == 0);
    CHECK(assign_type({"s", "different beta tokens", "x"}, types) == 1);
    // No overlap at all falls to the lowest index.
    CHECK(assign_type({"s", "zzz", "qqq"}, types) == 0);
    CHECK_THROWS(assign_type({"s", "i", "o"}, {}));

    // The stub's guided intent lands on the contextual canonical type.
    const auto& canon = canonical_omission_types();
    const TypeSample guided{
        "The measure passed today.",
        "[Contextual Omission] deliberately omitting relevant background "
        "information",
        "unstated background regarding the measure"};
    const int idx = assign_type(guided, canon);
    CHECK(canon[static_cast<std::size_t>(idx)].name == "Contextual");
}

TEST_CASE("type distributions standardize counts along the chosen axis") {
    const std::vector<std::string> order = {"Contextual", "Comparative"};

    SUBCASE("uniform counts have no spread") {
        std::vector<std::pair<int, std::string>> a;
        for (int cls : {0, 1}) {
            for (const auto& t : order) {
                a.emplace_back(cls, t);
                a.emplace_back(cls, t);
            }
        }
        const TypeDistribution d = type_distribution(a, order);
        CHECK(d.zero_variance);
        REQUIRE(d.cells.size() == 4);
        for (const auto& c : d.cells) {
            CHECK(c.count == 2);
            CHECK(c.rate == doctest::Approx(0.5));
            CHECK(c.z == 0.0);
        }
    }

    SUBCASE("across-types z uses population sigma within each class") {
        std::vector<std::pair<int, std::string>> a;
        // class 0: 3 and 3 (flat); class 1: 2 and 4.
        for (int i = 0; i < 3; ++i) a.emplace_back(0, "Contextual");
        for (int i = 0; i < 3; ++i) a.emplace_back(0, "Comparative");
        for (int i = 0; i < 2; ++i) a.emplace_back(1, "Contextual");
        for (int i = 0; i < 4; ++i) a.emplace_back(1, "Comparative");
        const TypeDistribution d = type_distribution(a, order, ZAxis::AcrossTypes);
        REQUIRE(d.cells.size() == 4);
        // Class-major layout: [real x Contextual, real x Comparative, ...].
        CHECK(d.cells[0].z == 0.0);
        CHECK(d.cells[1].z == 0.0);
        CHECK(d.cells[2].z == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(d.cells[3].z == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(d.zero_variance);  // the flat class-0 slice
        CHECK(d.cells[2].rate == doctest::Approx(2.0 / 6.0));
        CHECK(d.cells[3].rate == doctest::Approx(4.0 / 6.0));
    }

    SUBCASE("across-classes z standardizes each type column") {
        std::vector<std::pair<int, std::string>> a;
        for (int i = 0; i < 1; ++i) a.emplace_back(0, "Contextual");
        for (int i = 0; i < 3; ++i) a.emplace_back(0, "Comparative");
        for (int i = 0; i < 3; ++i) a.emplace_back(1, "Contextual");
        for (int i = 0; i < 1; ++i) a.emplace_back(1, "Comparative");
        const TypeDistribution d =
            type_distribution(a, order, ZAxis::AcrossClasses);
        CHECK(d.cells[0].z == doctest::Approx(-1.0));  // real, Contextual
        CHECK(d.cells[2].z == doctest::Approx(1.0));   // fake, Contextual
        CHECK(d.cells[1].z == doctest::Approx(1.0));   // real, Comparative
        CHECK(d.cells[3].z == doctest::Approx(-1.0));  // fake, Comparative
        CHECK(d.axis == ZAxis::AcrossClasses);
        CHECK_FALSE(d.zero_variance);
    }

    SUBCASE("z-scored slices have mean 0 and unit population variance") {
        const std::vector<std::string> wide = {"A", "B", "C", "D"};
        std::mt19937_64 gen(9);
        std::vector<std::pair<int, std::string>> a;
        for (int i = 0; i < 200; ++i) {
            a.emplace_back(static_cast<int>(gen() % 2),
                           wide[static_cast<std::size_t>(gen() % 4)]);
        }
        const TypeDistribution d = type_distribution(a, wide, ZAxis::AcrossTypes);
        if (!d.zero_variance) {
            for (int cls = 0; cls < 2; ++cls) {
                Scalar mean = 0, var = 0;
                for (const auto& c : d.cells) {
                    if (c.cls != cls) continue;
                    mean += c.z;
                }
                mean /= 4.0;
                for (const auto& c : d.cells) {
                    if (c.cls != cls) continue;
                    var += (c.z - mean) * (c.z - mean);
                }
                var /= 4.0;
                CHECK(std::abs(mean) < 1e-9);
                CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
    }

    SUBCASE("serialization covers every class x type cell") {
        std::vector<std::pair<int, std::string>> a = {{0, "Contextual"},
                                                      {1, "Comparative"}};
        const TypeDistribution d = type_distribution(a, order);
        const std::string csv = d.to_csv();
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4);
        CHECK(csv.rfind("class,type,count,rate,z\n", 0) == 0);
        CHECK(csv.find("real,Contextual,1,") != std::string::npos);
        CHECK(csv.find("fake,Comparative,1,") != std::string::npos);
        const std::string json = d.to_json();
        CHECK(json.find("across-types") != std::string::npos);
        CHECK(json.find("zero_variance") != std::string::npos);
    }

    SUBCASE("invalid inputs are rejected") {
        CHECK_THROWS(type_distribution({{0, "Unknown"}}, order));
        CHECK_THROWS(type_distribution({{2, "Contextual"}}, order));
        CHECK_THROWS(type_distribution({}, {}));
    }

    CHECK(z_axis_from_name(z_axis_name(ZAxis::AcrossTypes)) == ZAxis::AcrossTypes);
    CHECK(z_axis_from_name(z_axis_name(ZAxis::AcrossClasses)) ==
          ZAxis::AcrossClasses);
    CHECK_THROWS(z_axis_from_name("columns"));
}
