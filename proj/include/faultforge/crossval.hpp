#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace faultforge::crossval {

// Deterministic stratified partition of rows into k folds.
struct FoldPlan {
    std::size_t k = 10;
    std::vector<std::size_t> assignments;  // per-row fold index in [0,k)
    std::uint64_t seed = 0;

    std::size_t rows() const { return assignments.size(); }
};

// Shuffle each class by the seed, then deal round-robin with a fold cursor
// carried across classes so overall fold sizes differ by at most one.
// Throws StratificationError when any class has fewer than k members.
FoldPlan stratified_folds(const std::vector<int>& y, std::size_t k, std::uint64_t seed);

// Test rows = rows assigned to `fold`; train rows = the complement.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> fold_split(const FoldPlan& plan,
                                                                         std::size_t fold);

}  // namespace faultforge::crossval
