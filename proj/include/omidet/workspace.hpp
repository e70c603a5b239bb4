#pragma once

// Experiment workspace: a directory tree with one subdirectory per
// pipeline stage, stage manifests for skip/rerun logic, and an atomic
// directory lock so only one experiment touches a workspace at a time.
//
// Layout under the root:
//   config.txt            resolved run configuration
//   corpus/               ingested target/context corpora (JSONL)
//   graphs/               structural graphs, one JSON file per target
//   annotated/            graphs after relation modeling or simulation
//   cache/embeddings/     content-addressed embedding vectors
//   cache/llm/<version>/  annotator response cache
//   train/                checkpoints and training history
//   reports/              metrics, predictions, costs, type analyses
//   <stage>.manifest.json completion markers keyed by config hash

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace omidet {

struct StageManifest {
    std::string stage;
    std::string config_hash;
    std::int64_t items = 0;
    std::int64_t prompt_tokens = 0;
    std::int64_t completion_tokens = 0;
    std::string note;
};

class Workspace {
  public:
    explicit Workspace(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path config_file() const { return root_ / "config.txt"; }
    std::filesystem::path corpus_dir() const { return root_ / "corpus"; }
    std::filesystem::path graphs_dir() const { return root_ / "graphs"; }
    std::filesystem::path annotated_dir() const { return root_ / "annotated"; }
    std::filesystem::path embedding_cache_dir() const {
        return root_ / "cache" / "embeddings";
    }
    std::filesystem::path llm_cache_dir() const { return root_ / "cache" / "llm"; }
    std::filesystem::path train_dir() const { return root_ / "train"; }
    std::filesystem::path reports_dir() const { return root_ / "reports"; }

    // Creates the directory skeleton (idempotent).
    void ensure_layout() const;

    void write_manifest(const StageManifest& m) const;
    std::optional<StageManifest> read_manifest(const std::string& stage) const;

    // True when the stage's manifest exists and records this config hash.
    bool stage_complete(const std::string& stage,
                        const std::string& config_hash) const;

    // Drops completion markers (and stage outputs) of the given stages.
    void clear_stage(const std::string& stage) const;

  private:
    std::filesystem::path root_;
};

// Atomic mkdir-based lock; the destructor releases it. Throws when the
// workspace is already locked (stale locks must be removed by hand).
class WorkspaceLock {
  public:
    explicit WorkspaceLock(const Workspace& ws);
    ~WorkspaceLock();

    WorkspaceLock(const WorkspaceLock&) = delete;
    WorkspaceLock& operator=(const WorkspaceLock&) = delete;

  private:
    std::filesystem::path dir_;
};

}  // namespace omidet
