#include "faultforge/crossval.hpp"

#include <algorithm>

#include "faultforge/errors.hpp"
#include "faultforge/rng.hpp"

namespace faultforge::crossval {

FoldPlan stratified_folds(const std::vector<int>& y, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw StratificationError("k must be >= 2");

    std::vector<std::vector<std::size_t>> by_class(2);
    for (std::size_t i = 0; i < y.size(); ++i) by_class[static_cast<std::size_t>(y[i])].push_back(i);
    // Report the smallest infeasible class.
    int bad = -1;
    for (int c = 0; c < 2; ++c) {
        const auto& members = by_class[static_cast<std::size_t>(c)];
        if (members.empty() || members.size() >= k) continue;
        if (bad < 0 || members.size() < by_class[static_cast<std::size_t>(bad)].size()) bad = c;
    }
    if (bad >= 0)
        throw StratificationError(
            "class " + std::to_string(bad) + " has only " +
            std::to_string(by_class[static_cast<std::size_t>(bad)].size()) +
            " members, fewer than k=" + std::to_string(k));

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignments.assign(y.size(), 0);

    rng::Engine eng(rng::derive(seed, {rng::hash_label("stratified-folds"), k}));
    std::size_t cursor = 0;  // carried across classes so fold sizes stay within 1
    for (auto& members : by_class) {
        eng.shuffle(members);
        for (std::size_t idx : members) {
            plan.assignments[idx] = cursor % k;
            ++cursor;
        }
    }
    return plan;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> fold_split(const FoldPlan& plan,
                                                                         std::size_t fold) {
    if (fold >= plan.k) throw Error("fold index " + std::to_string(fold) + " out of range");
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < plan.assignments.size(); ++i)
        (plan.assignments[i] == fold ? test : train).push_back(i);
    return {train, test};
}

}  // namespace faultforge::crossval
