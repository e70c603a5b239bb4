#pragma once

// Stage orchestration over a workspace: ingest -> build-env ->
// annotate (retrieved environments + intent inference, or simulation)
// -> train -> eval, plus the multi-seed experiment driver. Stages are
// pure functions of (workspace contents, config); completed stages are
// skipped when their manifest records the same config hash, unless
// forced.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "omidet/config.hpp"
#include "omidet/cost.hpp"
#include "omidet/llm.hpp"
#include "omidet/metrics.hpp"
#include "omidet/train.hpp"
#include "omidet/workspace.hpp"

namespace omidet {

// Config hash over the keys that shape corpora, environments and
// annotations only — model/training/seed knobs don't invalidate graphs.
std::string environment_hash(const RunConfig& cfg);

// Filesystem-safe per-target graph file name (sanitized id, hash suffix
// when sanitizing changed it).
std::string graph_filename(const std::string& target_id);

// Copies both corpora into the workspace in normalized form. The context
// path may be empty (simulation modes need no context corpus).
void stage_ingest(const Workspace& ws, const RunConfig& cfg,
                  const std::filesystem::path& targets_path,
                  const std::filesystem::path& context_path, bool force = false);

// Structural graphs per target: retrieved top-K environment in retrieve
// mode, target-only otherwise. Returns the number of graphs built.
int stage_build_env(const Workspace& ws, const RunConfig& cfg,
                    bool force = false);

struct AnnotateStats {
    int items = 0;
    int degraded_items = 0;
    int parse_warnings = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
};

// Relation modeling (retrieve mode) or environment simulation (sim-zero /
// sim-rule) over every graph; writes annotated graphs and per-method
// usage records for cost reports. `client_override` lets tests inject a
// shared stub.
AnnotateStats stage_annotate(const Workspace& ws, const RunConfig& cfg,
                             bool force = false,
                             std::shared_ptr<LlmClient> client_override = nullptr);

// Annotated graphs + item embeddings grouped by split.
Dataset load_dataset(const Workspace& ws, const RunConfig& cfg);

struct TrainStageResult {
    TrainResult outcome;
    std::filesystem::path checkpoint;
    std::filesystem::path history;
};

TrainStageResult stage_train(const Workspace& ws, const RunConfig& cfg,
                             bool force = false);

// Evaluates a checkpoint (default: the one stage_train wrote for
// cfg.seed) on a split; writes the metrics report and prediction CSV.
MetricsReport stage_eval(const Workspace& ws, const RunConfig& cfg,
                         const std::string& split,
                         std::filesystem::path checkpoint = {});

// Full pipeline over cfg.seeds: shared ingest/build-env/annotate, then
// train+eval per seed. Writes the aggregate report (mean and sample std
// per metric) and the method usage record; returns the aggregate.
AggregateReport run_experiment(const Workspace& ws, const RunConfig& cfg,
                               const std::filesystem::path& targets_path,
                               const std::filesystem::path& context_path,
                               bool force = false,
                               std::shared_ptr<LlmClient> client_override = nullptr);

// Cost report across the method usage records found in the given
// workspaces (deduplicated by method name, later entries win).
CostReport cost_report_from_workspaces(
    const std::vector<std::filesystem::path>& roots);

}  // namespace omidet
