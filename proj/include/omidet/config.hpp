#pragma once

// Run configuration: one flat key=value file covering every pipeline
// knob. Unknown keys are errors (typos must not silently fall back to
// defaults). The canonical dump — fixed key order, round-trip number
// formatting — also defines the config hash that cache entries and
// checkpoints carry.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "omidet/detector.hpp"
#include "omidet/encoder.hpp"
#include "omidet/gnn.hpp"
#include "omidet/llm.hpp"
#include "omidet/train.hpp"

namespace omidet {

struct RunConfig {
    int max_segments = 32;
    int k = 32;       // environment size
    int t_days = 3;   // retrieval window
    EncoderSpec encoder;
    LlmClientSpec client;
    GnnConfig gnn;
    FusionMode fusion = FusionMode::Representation;
    bool joint_base = true;
    TrainConfig train;  // train.seed is overridden by `seed` at run time
    // Environment source: "retrieve" (corpus + annotator),
    // "sim-zero" or "sim-rule" (simulated, no retrieval).
    std::string pipeline_mode = "retrieve";
    std::uint64_t seed = 1234;
    std::vector<std::uint64_t> seeds = {1234, 1235, 1236};  // multi-seed `run`
};

RunConfig default_run_config();

// Parses `key=value` lines ('#' comments, blank lines ignored); throws
// with the line number on malformed lines, unknown keys, or bad values.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical serialization: every key, fixed order, shortest round-trip
// numbers. parse(dump(c)) == c.
std::string dump_run_config(const RunConfig& cfg);

// SHA-256 of the canonical dump.
std::string config_hash(const RunConfig& cfg);

// Field-level sanity checks (positive sizes, known mode names, ...).
void validate_run_config(const RunConfig& cfg);

// Model construction view of the config; d_enc = encoder dimension.
ModelConfig model_config_from(const RunConfig& cfg);

}  // namespace omidet
