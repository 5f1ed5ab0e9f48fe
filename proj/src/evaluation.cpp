#include "faultforge/evaluation.hpp"

#include <cmath>

#include "faultforge/errors.hpp"

namespace faultforge::evaluation {

ConfusionMatrix confusion(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size()) throw Error("confusion: length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1)
            (y_pred[i] == 1 ? cm.tp : cm.fn) += 1;
        else
            (y_pred[i] == 1 ? cm.fp : cm.tn) += 1;
    }
    return cm;
}

FoldMetrics metrics(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw Error("metrics: empty confusion matrix");
    FoldMetrics m;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    if (cm.tp + cm.fp == 0) {
        m.precision = 0.0;
        m.precision_undefined = true;
    } else {
        m.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
    }
    if (cm.tp + cm.fn == 0) {
        m.recall = 0.0;
        m.recall_undefined = true;
    } else {
        m.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    }
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

namespace {

MetricStats stats_of(const std::vector<FoldMetrics>& folds, double FoldMetrics::*field) {
    MetricStats s;
    const double n = static_cast<double>(folds.size());
    bool all_equal = true;
    for (const auto& f : folds) {
        s.mean += f.*field;
        all_equal = all_equal && f.*field == folds.front().*field;
    }
    s.mean /= n;
    if (all_equal) {
        s.mean = folds.front().*field;
        return s;  // stddev exactly 0
    }
    double acc = 0.0;
    for (const auto& f : folds) {
        const double d = f.*field - s.mean;
        acc += d * d;
    }
    s.stddev = std::sqrt(acc / n);
    return s;
}

}  // namespace

EvaluationReport aggregate(const std::vector<FoldMetrics>& folds) {
    if (folds.empty()) throw Error("aggregate: no folds");
    EvaluationReport r;
    r.folds = folds;
    r.accuracy = stats_of(folds, &FoldMetrics::accuracy);
    r.precision = stats_of(folds, &FoldMetrics::precision);
    r.recall = stats_of(folds, &FoldMetrics::recall);
    r.f1 = stats_of(folds, &FoldMetrics::f1);
    for (const auto& f : folds) {
        r.train_seconds_total += f.train_seconds;
        r.test_seconds_total += f.test_seconds;
    }
    return r;
}

}  // namespace faultforge::evaluation
