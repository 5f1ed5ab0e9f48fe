#pragma once

#include <cstdint>
#include <vector>

#include "faultforge/dataset.hpp"

namespace faultforge::classifiers {

struct RfParams {
    std::size_t n_estimators = 100;
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    std::uint64_t seed = 0;
};

// Flat node layout; leaves keep their training class counts.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::uint32_t count0 = 0;
    std::uint32_t count1 = 0;
    int leaf_class = 0;
};

struct Tree {
    std::vector<TreeNode> nodes;

    int predict_one(const double* x) const {
        int at = 0;
        while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
            const TreeNode& n = nodes[static_cast<std::size_t>(at)];
            at = x[n.feature] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(at)].leaf_class;
    }
};

struct ForestModel {
    std::vector<Tree> trees;
    std::size_t n_features = 0;

    bool operator==(const ForestModel&) const;
};

// Bagged Gini trees: each tree trains on an n-row bootstrap, every split
// considers ceil(sqrt(p)) features sampled without replacement, and the best
// exact threshold by weighted Gini wins (ties toward the first candidate and
// the lowest threshold). Tree t draws from sub-seed derive(seed, {"rf-tree", t}),
// so forests with the same seed share their leading trees regardless of
// n_estimators or thread count.
ForestModel train_rf(const Matrix& X, const std::vector<int>& y, const RfParams& p);

// Majority vote across trees; an exact tie maps to label 0.
std::vector<int> predict_rf(const ForestModel& m, const Matrix& X);
std::vector<int> predict_rf_serial(const ForestModel& m, const Matrix& X);

// Per-row count of trees voting 1 (exposed for vote-margin analysis).
std::vector<std::size_t> rf_votes(const ForestModel& m, const Matrix& X);

// Majority-vote labels after the first t trees, for each t in tree_counts
// (ascending, each <= trees.size()). Because tree t always draws from the
// same sub-seed, this equals predicting with separately trained t-tree
// forests of the same seed.
std::vector<std::vector<int>> predict_rf_prefixes(const ForestModel& m, const Matrix& X,
                                                  const std::vector<std::size_t>& tree_counts);

}  // namespace faultforge::classifiers
