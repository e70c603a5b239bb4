#pragma once

// Deterministic synthetic corpus generator for desk-scale experiments.
//
// The corpus is organized into events spaced a week apart. Each event
// owns disjoint topic and causal-fact vocabularies; its context items
// (published hours before the target, inside the retrieval window) carry
// the topic tokens plus causal-fact tokens, every causal token appearing
// in at least two context items. Real and fake targets use the identical
// sentence template; real targets state the causal tokens, fake targets
// replace the omitted ones with fillers that occur nowhere else. The
// only class signal that generalizes across events is therefore the
// omission relation between a target and its context — exactly what the
// graph pipeline models and a target-text-only detector cannot see.

#include <cstdint>
#include <string>
#include <vector>

#include "omidet/corpus.hpp"

namespace omidet {

struct SyntheticSpec {
    int n_events = 10;          // one target per event
    int items_per_event = 4;    // context items per event
    int fact_vocab = 256;       // distinct vocabulary words available
    double omission_rate = 1.0; // fraction of causal tokens a fake omits
    std::string label_rule = "parity";  // even event index => real
    std::uint64_t seed = 7;
};

struct SyntheticCorpora {
    Corpus targets;
    Corpus context;
};

// Pure function of the spec: same spec => byte-identical serialized
// corpora. Throws when the vocabulary is too small for the event count
// or a field is out of range.
SyntheticCorpora generate_synthetic(const SyntheticSpec& spec);

}  // namespace omidet
