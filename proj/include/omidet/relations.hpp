#pragma once

// Inter-source relation modeling: render an intent prompt per (target
// item, environment item) pair, parse the annotator's triples back into
// segment references, and materialize inter edges carrying encoded intent
// text. The intra-source edge-attribute network is trainable and lives
// with the model; this module owns everything that talks to the LLM.

#include <string>
#include <vector>

#include "omidet/encoder.hpp"
#include "omidet/graph.hpp"
#include "omidet/llm.hpp"

namespace omidet {

struct SegmentRef {
    std::string parent_id;
    int index = 0;

    bool operator==(const SegmentRef& o) const {
        return parent_id == o.parent_id && index == o.index;
    }
};

struct IntentAnnotation {
    SegmentRef target_seg;
    SegmentRef context_seg;
    bool flagged = false;
    std::string intent_text;     // empty unless flagged
    std::string raw_response_id; // response-cache key of the producing call
};

// One {[env], [intent], [target]} triple as raw text fields.
struct ParsedTriple {
    std::string env_text;
    std::string intent_text;
    std::string target_text;
};

// All balanced bracket groups in order, chunked into threes; braces, line
// breaks and stray whitespace between groups are tolerated, nested
// brackets (e.g. a "[Contextual Omission]" tag inside the intent field)
// stay part of their field, and surrounding quotes are stripped. A
// trailing partial chunk is discarded.
std::vector<ParsedTriple> extract_triples(const std::string& raw);

// Index of the segment a quoted field refers to: exact text match first,
// then highest token-Jaccard above 0.5; -1 when nothing qualifies.
int match_segment(const std::string& field,
                  const std::vector<std::string>& segments);

struct ParseResult {
    std::vector<IntentAnnotation> annotations;
    int dropped = 0;    // triples whose fields matched no known segment
    bool warning = false;  // non-empty reply yielded zero parseable triples
};

// Maps triples back to segment indices: exact text match first, then
// highest token-Jaccard >= 0.5; triples below that are dropped.
ParseResult parse_intent_response(const std::string& raw,
                                  const std::string& target_parent,
                                  const std::vector<std::string>& target_segments,
                                  const std::string& env_parent,
                                  const std::vector<std::string>& env_segments);

// Prompt-format rendering of flagged annotations, one triple per line;
// parse_intent_response() of the result recovers the same annotation set.
std::string serialize_annotations(const std::vector<IntentAnnotation>& annotations,
                                  const std::vector<std::string>& target_segments,
                                  const std::vector<std::string>& env_segments);

struct IntentStageResult {
    std::vector<IntentAnnotation> annotations;
    int prompts_issued = 0;
    int parse_warnings = 0;
    bool degraded = false;  // at least one env item failed after retries
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

// One client call per (target item, environment item) pair, bounded by
// max_parallel. Remote failures mark the stage degraded and leave that
// item unannotated rather than aborting.
IntentStageResult infer_intents(const OmissionGraph& graph, LlmClient& client,
                                const std::string& model_name,
                                int max_parallel = 1);

// Gives the stub client the cross-item visibility its flagging rule needs:
// registers the graph's target segment texts with all context items.
void register_stub_environment(StubLlmClient& stub, const OmissionGraph& graph);

// Raw encoder embedding of an intent text; throws on empty text.
Vec encode_intent(const std::string& intent_text, const TextEncoder& encoder);

// Materializes inter edges: each flagged annotation becomes two directed
// edges (both orientations) sharing one intent text and embedding. When
// nothing is flagged but context nodes exist, each target node is joined
// to its most cosine-similar context node with the neutral text
// "no omission detected" so the sources stay connected.
void apply_intent_annotations(OmissionGraph& g,
                              const std::vector<IntentAnnotation>& annotations,
                              const TextEncoder& encoder);

// Workspace (de)serialization of a stage result.
std::string intent_stage_to_json(const IntentStageResult& r);
IntentStageResult intent_stage_from_json(const std::string& text);

}  // namespace omidet
