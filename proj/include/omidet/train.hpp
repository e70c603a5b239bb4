#pragma once

// Mini-batch training with early stopping.
//
// Each example owns a prebuilt relation-annotated graph plus the raw
// encoder embedding of the full target text. Gradients are accumulated
// per example on a fresh tape, scaled by 1/batch-size, and applied with
// decoupled weight decay. Early stopping watches validation macro F1;
// the best-epoch parameters are restored into the model before
// returning, so the caller can save them as the checkpoint.

#include <cstdint>
#include <string>
#include <vector>

#include "omidet/detector.hpp"
#include "omidet/metrics.hpp"

namespace omidet {

struct TrainConfig {
    int batch_size = 64;
    Scalar learning_rate = 2e-5;
    Scalar weight_decay = 0.01;
    int max_epochs = 100;
    int patience = 5;
    std::uint64_t seed = 1234;
};

struct Example {
    std::string item_id;
    OmissionGraph graph;
    Vec item_embedding;  // raw encoder vector of the whole target text
    int label = 0;
};

struct Dataset {
    std::vector<Example> train;
    std::vector<Example> val;
    std::vector<Example> test;
};

struct EpochRecord {
    int epoch = 0;
    Scalar train_loss = 0;
    Scalar val_macro_f1 = 0;
    Scalar val_accuracy = 0;
};

struct TrainResult {
    std::vector<EpochRecord> history;
    int best_epoch = -1;
    Scalar best_val_macro_f1 = -1;
    bool early_stopped = false;

    std::string to_json() const;
};

// Deterministic Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng);

// Copies of every parameter value, in registry order.
std::vector<Mat> snapshot_params(const ParamStore& store);
void restore_params(ParamStore& store, const std::vector<Mat>& snapshot);

// Trains all model parameters on data.train, early-stops on data.val
// macro F1, and leaves the best-epoch parameters in the model. Throws on
// a non-finite loss or gradient with the epoch and item in the message.
TrainResult train_model(OmissionModel& model, const Dataset& data,
                        const TrainConfig& cfg);

std::vector<PredictionRecord> predict_split(const OmissionModel& model,
                                            const std::vector<Example>& split);

// Threshold-0.5 metrics of the model on a split; throws on empty split.
MetricsReport evaluate_model(const OmissionModel& model,
                             const std::vector<Example>& split,
                             const std::string& split_name = "");

// Same protocol for the target-only reference detector (logistic probe on
// item embeddings): train with early stopping, restore best, report.
TrainResult train_probe(BaseProbe& probe, const Dataset& data,
                        const TrainConfig& cfg);

MetricsReport evaluate_probe(const BaseProbe& probe,
                             const std::vector<Example>& split,
                             const std::string& split_name = "");

}  // namespace omidet
