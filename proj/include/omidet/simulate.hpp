#pragma once

// Simulated contextual environments and the omission-type taxonomy
// pipeline.
//
// Simulation asks the annotator to invent plausibly-omitted information
// for a target (zero-shot, or guided by the eight-type taxonomy); the
// parsed triples become one synthetic context item whose nodes join the
// target graph exactly like retrieved context. The taxonomy pipeline
// batches intent annotations through the type-analysis prompt, merges
// batch outputs with the consolidation prompt, assigns each annotation a
// type by token overlap, and reports z-scored per-class distributions.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "omidet/encoder.hpp"
#include "omidet/graph.hpp"
#include "omidet/llm.hpp"
#include "omidet/prompts.hpp"
#include "omidet/taxonomy.hpp"

namespace omidet {

struct SimulatedSegment {
    int target_index = 0;        // segment index within the target item
    std::string target_text;
    std::string omitted_text;
    std::string intent_text;
    SimMode mode = SimMode::Zero;
    std::string raw_response_id;  // response-cache key of the producing call
};

struct SimulationResult {
    std::vector<SimulatedSegment> segments;
    int prompts_issued = 0;
    int parse_warnings = 0;  // unparseable replies or dropped triples
    bool degraded = false;   // annotator failed after retries
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

// One simulation call for a target; triples whose target field matches no
// segment, or with empty texts, are dropped and counted. An annotator
// failure yields an empty result flagged degraded (the item then runs
// target-only).
SimulationResult simulate_environment(const std::vector<std::string>& target_segments,
                                      LlmClient& client,
                                      const std::string& model_name, SimMode mode);

// Appends the simulated segments to a target-only graph as one synthetic
// context item (parent "<target_id>#sim"): intra clique among simulated
// nodes, inter edges both ways between each simulated node and its target
// segment, carrying the encoded intent. No-op on an empty simulation.
void apply_simulation(OmissionGraph& g, const SimulationResult& sim,
                      const TextEncoder& encoder);

// One intent-analysis sample for the type pipeline.
struct TypeSample {
    std::string segment;  // context or simulated segment text
    std::string intent;
    std::string omitted;  // omitted/contextual information text
};

std::string format_type_sample(const TypeSample& s);

// "[Name, Description]" lines -> types; a trailing " Omission" suffix is
// folded into the short name.
std::vector<OmissionType> parse_type_lines(const std::string& raw);

struct TypeAnalysisResult {
    std::vector<std::vector<OmissionType>> batch_types;
    std::vector<OmissionType> final_types;
    int batches = 0;
    int parse_warnings = 0;        // batches skipped as unparseable
    bool count_out_of_range = false;  // final list outside 5..8 types
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

// One type-analysis call per batch of `batch_size` samples (last batch
// may be short). Unparseable batches are skipped with a warning.
TypeAnalysisResult categorize_batches(const std::vector<TypeSample>& samples,
                                      int batch_size, LlmClient& client,
                                      const std::string& model_name);

// Single consolidation call over all per-batch type lines; duplicates are
// removed (first occurrence wins) and an out-of-range final count is
// flagged, not corrected.
std::vector<OmissionType> consolidate_types(
    const std::vector<std::vector<OmissionType>>& batch_types, LlmClient& client,
    const std::string& model_name, TypeAnalysisResult* stats = nullptr);

// Convenience wrapper: categorize, then consolidate.
TypeAnalysisResult analyze_types(const std::vector<TypeSample>& samples,
                                 int batch_size, LlmClient& client,
                                 const std::string& model_name);

// Index of the type whose name+definition shares the most tokens with the
// sample's intent+omitted text; ties and no-overlap fall to the lowest
// index.
int assign_type(const TypeSample& sample, const std::vector<OmissionType>& types);

enum class ZAxis { AcrossTypes, AcrossClasses };

std::string z_axis_name(ZAxis axis);
ZAxis z_axis_from_name(const std::string& name);

struct TypeCell {
    int cls = 0;  // 0 = real, 1 = fake
    std::string type;
    std::int64_t count = 0;
    Scalar rate = 0;  // count / items of the class
    Scalar z = 0;     // standardized count along the configured axis
};

struct TypeDistribution {
    std::vector<std::string> type_order;
    std::vector<TypeCell> cells;  // classes x types, class-major
    ZAxis axis = ZAxis::AcrossTypes;
    bool zero_variance = false;  // some axis slice had no spread; its z = 0

    std::string to_csv() const;
    std::string to_json() const;
};

// assignments: (class label, type name) per categorized annotation.
TypeDistribution type_distribution(
    const std::vector<std::pair<int, std::string>>& assignments,
    const std::vector<std::string>& type_order, ZAxis axis = ZAxis::AcrossTypes);

}  // namespace omidet
