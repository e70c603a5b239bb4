#pragma once

// Prompt templates for the LLM annotator.
//
// The five templates (veracity judgment, omission-intent inference,
// batch-wise omission-type analysis, final type consolidation, and
// omission simulation) are pinned byte-for-byte, including a few oddities
// of the original texts (the intent-inference example lists "e2" twice and
// swaps the field order relative to its own format line; the simulation
// guidance block opens a parenthesis it never closes). Tests assert marker
// substrings, so edits here are breaking changes.

#include <string>
#include <vector>

namespace omidet {

struct PromptPair {
    std::string system;
    std::string context;
};

// Veracity judgment over a single news text.
PromptPair render_veracity_prompt(const std::string& news_text);

// Omission-intent inference over one (target item, context item) pair.
// Segments are quoted and space-joined inside the start/end markers.
// Throws std::invalid_argument when either list is empty.
PromptPair render_intent_prompt(const std::vector<std::string>& target_segments,
                                const std::vector<std::string>& env_segments);

// Batch-wise omission-type analysis; one rendered sample line per
// annotation, newline-joined into the batch placeholder.
PromptPair render_batch_type_prompt(const std::vector<std::string>& sample_lines);

// Final consolidation over per-batch type lines.
PromptPair render_consolidate_prompt(const std::vector<std::string>& batch_lines);

enum class SimMode { Zero, Rule };

std::string sim_mode_name(SimMode mode);
SimMode sim_mode_from_name(const std::string& name);

// Omitted-information simulation; Rule mode includes the eight-type
// guidance block, Zero mode omits it.
PromptPair render_sim_prompt(const std::vector<std::string>& target_segments,
                             SimMode mode);

}  // namespace omidet
