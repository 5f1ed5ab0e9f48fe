#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace faultforge::evaluation {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t tn = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + tn + fp + fn; }
};

struct FoldMetrics {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double train_seconds = 0.0;
    double test_seconds = 0.0;
    bool precision_undefined = false;  // tp+fp == 0, reported as 0
    bool recall_undefined = false;     // tp+fn == 0, reported as 0
};

struct MetricStats {
    double mean = 0.0;
    double stddev = 0.0;  // population
};

struct EvaluationReport {
    std::vector<FoldMetrics> folds;
    MetricStats accuracy;
    MetricStats precision;
    MetricStats recall;
    MetricStats f1;
    double train_seconds_total = 0.0;
    double test_seconds_total = 0.0;
    std::string fingerprint;  // configuration description, filled by the pipeline
};

// Positive class is 1. Throws on length mismatch.
ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Accuracy/precision/recall/F1 from the cell counts. Undefined ratios
// (empty denominator) are reported as 0 with the matching flag set; timing
// fields are left at 0 for the caller to fill.
FoldMetrics metrics(const ConfusionMatrix& cm);

// Unweighted mean and population standard deviation per metric; timings summed.
EvaluationReport aggregate(const std::vector<FoldMetrics>& folds);

}  // namespace faultforge::evaluation
