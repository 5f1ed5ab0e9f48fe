#pragma once

#include <cstdint>
#include <vector>

#include "faultforge/dataset.hpp"

namespace faultforge::feature_selection {

enum class Method { RFE, L1, MI, CFS };

struct FeatureSubset {
    std::vector<std::size_t> indices;  // ascending original feature indices
    std::vector<double> scores;        // parallel to indices
    Method method = Method::RFE;
    bool constant_feature_warning = false;  // CFS skipped zero-variance features
};

struct SelectorConfig {
    std::size_t target_count = 10;  // RFE and MI
    double l1_strength = 1.0;       // C of the L1 logistic fit
    std::size_t mi_bins = 10;
    std::size_t cfs_patience = 5;
    std::uint64_t seed = 0;
};

// Wrapper elimination: refit an L2 logistic regression, drop the feature
// with the smallest |coefficient| (ties drop the higher index), repeat until
// target_count remain. Scores are the final fit's |coefficients|.
FeatureSubset select_rfe(const Matrix& X, const std::vector<int>& y, const SelectorConfig& cfg);

// L1-penalized logistic fit at C = l1_strength; keeps features with
// |coefficient| > 1e-8 and reports signed coefficients as scores.
// Throws EmptySelectionError when everything is shrunk to zero.
FeatureSubset select_l1(const Matrix& X, const std::vector<int>& y, const SelectorConfig& cfg);

// Plug-in mutual information (nats) against equal-frequency bins,
// min(mi_bins, floor(sqrt(n))) bins per feature; keeps the target_count
// highest, ties toward the lower index.
FeatureSubset select_mi(const Matrix& X, const std::vector<int>& y, const SelectorConfig& cfg);

// Greedy forward search on the correlation merit
// (k*mean|r_cf|) / sqrt(k + k(k-1)*mean|r_ff|); expansion continues through
// cfs_patience consecutive non-improving additions and the best prefix wins.
FeatureSubset select_cfs(const Matrix& X, const std::vector<int>& y, const SelectorConfig& cfg);

// Helpers shared with tests.
double mutual_information_binned(const std::vector<double>& x, const std::vector<int>& y,
                                 std::size_t bins);
std::vector<std::size_t> equal_frequency_bins(const std::vector<double>& x, std::size_t bins,
                                              std::size_t& out_bin_count);
double pearson(const std::vector<double>& a, const std::vector<double>& b);
double cfs_merit(const Matrix& X, const std::vector<int>& y,
                 const std::vector<std::size_t>& subset);

}  // namespace faultforge::feature_selection
