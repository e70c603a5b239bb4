#pragma once

// Shared wiring for tests: runs the retrieval + stub-annotation pipeline
// over a synthetic corpus without going through a workspace, producing a
// split dataset ready for training. Mirrors the orchestration stages so
// training-level tests stay independent of the workspace layer.

#include <utility>

#include "omidet/corpus.hpp"
#include "omidet/encoder.hpp"
#include "omidet/graph.hpp"
#include "omidet/llm.hpp"
#include "omidet/relations.hpp"
#include "omidet/synthetic.hpp"
#include "omidet/train.hpp"

namespace omidet::testsupport {

struct StubPipelineOptions {
    int d_enc = 48;        // hashing-encoder width
    int k = 8;             // environment size
    int t_days = 3;        // retrieval window
    int max_segments = 32; // per-item segment cap
};

// Retrieval + stub intent annotation for one target; returns the
// annotated graph.
inline OmissionGraph annotate_target(const NewsItem& target,
                                     const Corpus& context,
                                     const TextEncoder& encoder,
                                     SegmentStore& segments, StubLlmClient& stub,
                                     const StubPipelineOptions& opt) {
    const CandidatePool pool = build_candidate_pool(target, context, opt.t_days);
    const ContextEnvironment env =
        select_environment(target, pool, opt.k, encoder, context);
    OmissionGraph g = build_graph(target, env, segments, encoder, context);
    register_stub_environment(stub, g);
    const IntentStageResult stage = infer_intents(g, stub, "stub-model", 1);
    apply_intent_annotations(g, stage.annotations, encoder);
    return g;
}

// Full corpus -> split dataset (train/val/test per the targets' split
// fields). Labels must be present on every target.
inline Dataset build_stub_dataset(const SyntheticCorpora& corpora,
                                  const StubPipelineOptions& opt = {}) {
    const HashingEncoder encoder(opt.d_enc, "v1");
    SegmentStore segments(opt.max_segments);
    StubLlmClient stub;
    Dataset data;
    for (const auto& target : corpora.targets.items()) {
        OmissionGraph g =
            annotate_target(target, corpora.context, encoder, segments, stub, opt);
        Example ex;
        ex.item_id = target.id;
        ex.graph = std::move(g);
        ex.item_embedding = encoder.encode(target.text);
        ex.label = target.label.value();
        switch (target.split.value()) {
            case Split::Train: data.train.push_back(std::move(ex)); break;
            case Split::Val: data.val.push_back(std::move(ex)); break;
            case Split::Test: data.test.push_back(std::move(ex)); break;
        }
    }
    return data;
}

}  // namespace omidet::testsupport
