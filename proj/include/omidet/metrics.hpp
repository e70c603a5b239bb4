#pragma once

// Binary-classification metrics: confusion counts at a decision
// threshold, per-class F1 (real = class 0, fake = class 1), macro F1 as
// their unweighted mean, and accuracy. Reports serialize to JSON and to
// one flat CSV row. Multi-seed runs aggregate to mean and sample
// standard deviation per metric.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "omidet/math.hpp"

namespace omidet {

struct PredictionRecord {
    std::string item_id;
    Scalar y_hat = 0.5;  // fused probability in [0,1]
    int y = 0;           // gold label, 0 = real, 1 = fake
    std::string mode;    // fusion kind that produced y_hat
    std::optional<Scalar> base_score;  // base-detector component, if any
};

// Positive class is fake (label 1).
struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
};

ConfusionMatrix confusion(const std::vector<int>& y_true,
                          const std::vector<int>& y_pred);

// F1 of one class from the positive-class confusion counts; a zero
// denominator (class absent and never predicted) yields 0.
Scalar class_f1(const ConfusionMatrix& cm, int cls);

struct MetricsReport {
    std::string split;
    std::int64_t n = 0;
    Scalar accuracy = 0;
    Scalar f1_real = 0;
    Scalar f1_fake = 0;
    Scalar macro_f1 = 0;
    ConfusionMatrix cm;

    std::string to_json() const;
    static MetricsReport from_json(const std::string& text);

    static std::string csv_header();
    std::string csv_row() const;
};

// Thresholded metrics; throws on empty or mismatching inputs.
MetricsReport compute_metrics(const std::vector<int>& y_true,
                              const std::vector<Scalar>& y_hat,
                              Scalar threshold = 0.5,
                              const std::string& split = "");

MetricsReport compute_metrics(const std::vector<PredictionRecord>& records,
                              Scalar threshold = 0.5,
                              const std::string& split = "");

struct MetricSummary {
    Scalar mean = 0;
    Scalar stddev = 0;  // sample standard deviation, 0 when n < 2
};

MetricSummary summarize(const std::vector<Scalar>& values);

// Mean and sample std of each metric over per-seed reports.
struct AggregateReport {
    std::vector<MetricsReport> runs;
    MetricSummary accuracy;
    MetricSummary f1_real;
    MetricSummary f1_fake;
    MetricSummary macro_f1;

    std::string to_json() const;
    static AggregateReport from_json(const std::string& text);
    static std::string csv_header();
    std::string csv_row(const std::string& label) const;
};

AggregateReport aggregate_metrics(const std::vector<MetricsReport>& runs);

}  // namespace omidet
