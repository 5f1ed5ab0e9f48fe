#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "faultforge/crossval.hpp"
#include "faultforge/errors.hpp"
#include "faultforge/rng.hpp"

using namespace faultforge;

namespace {

std::vector<int> labels(std::size_t n, std::size_t positives) {
    std::vector<int> y(n, 0);
    for (std::size_t i = 0; i < positives; ++i) y[i] = 1;
    return y;
}

std::vector<std::size_t> fold_sizes(const crossval::FoldPlan& plan) {
    std::vector<std::size_t> sizes(plan.k, 0);
    for (std::size_t f : plan.assignments) ++sizes[f];
    return sizes;
}

std::vector<std::size_t> fold_positives(const crossval::FoldPlan& plan,
                                        const std::vector<int>& y) {
    std::vector<std::size_t> pos(plan.k, 0);
    for (std::size_t i = 0; i < y.size(); ++i) pos[plan.assignments[i]] += static_cast<std::size_t>(y[i]);
    return pos;
}

}  // namespace

TEST_CASE("divisible case: every fold gets exactly 2 positives and 8 negatives") {
    const auto y = labels(100, 20);
    const auto plan = crossval::stratified_folds(y, 10, 42);
    const auto pos = fold_positives(plan, y);
    const auto sizes = fold_sizes(plan);
    for (std::size_t f = 0; f < 10; ++f) {
        CHECK(pos[f] == 2);
        CHECK(sizes[f] == 10);
    }
}

TEST_CASE("a class smaller than k raises a stratification error naming the class") {
    const auto y = labels(10, 3);
    CHECK_THROWS_AS(crossval::stratified_folds(y, 10, 1), StratificationError);
    try {
        crossval::stratified_folds(y, 10, 1);
    } catch (const StratificationError& e) {
        CHECK(std::string(e.what()).find("class 1") != std::string::npos);
        CHECK(std::string(e.what()).find('3') != std::string::npos);
    }
}

TEST_CASE("n=23, 7 positives, k=5: positives 1-2 per fold, sizes 4-5") {
    const auto y = labels(23, 7);
    const auto plan = crossval::stratified_folds(y, 5, 7);
    for (std::size_t v : fold_positives(plan, y)) CHECK((v == 1 || v == 2));
    for (std::size_t v : fold_sizes(plan)) CHECK((v == 4 || v == 5));
}

TEST_CASE("fold_split partitions rows: disjoint, covering, right sizes") {
    const auto y = labels(100, 20);
    const auto plan = crossval::stratified_folds(y, 10, 3);
    auto [train, test] = crossval::fold_split(plan, 0);
    CHECK(train.size() == 90);
    CHECK(test.size() == 10);
    std::set<std::size_t> all(train.begin(), train.end());
    all.insert(test.begin(), test.end());
    CHECK(all.size() == 100);

    CHECK_THROWS_AS(crossval::fold_split(plan, 10), Error);
}

TEST_CASE("same seed gives an identical plan, different seed differs") {
    const auto y = labels(60, 20);
    const auto a = crossval::stratified_folds(y, 6, 5);
    const auto b = crossval::stratified_folds(y, 6, 5);
    CHECK(a.assignments == b.assignments);
    const auto c = crossval::stratified_folds(y, 6, 6);
    CHECK(a.assignments != c.assignments);
}

TEST_CASE("each row is a test row exactly once across the k folds") {
    const auto y = labels(47, 13);
    const auto plan = crossval::stratified_folds(y, 5, 11);
    std::vector<int> seen(47, 0);
    for (std::size_t f = 0; f < 5; ++f) {
        auto [train, test] = crossval::fold_split(plan, f);
        for (std::size_t i : test) ++seen[i];
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
}

TEST_CASE("stratification bound holds over 100 random configurations") {
    rng::Engine eng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t k = 2 + eng.below(9);
        const std::size_t n = k * 2 + eng.below(400);
        const double rate = 0.05 + 0.9 * eng.uniform();
        std::size_t positives = static_cast<std::size_t>(rate * static_cast<double>(n));
        positives = std::clamp<std::size_t>(positives, k, n - k);  // keep both classes feasible

        std::vector<int> y(n, 0);
        for (std::size_t i = 0; i < positives; ++i) y[i] = 1;
        rng::Engine sh(trial);
        sh.shuffle(y);

        const auto plan = crossval::stratified_folds(y, k, eng.next());
        const double global_rate = static_cast<double>(positives) / static_cast<double>(n);
        const auto sizes = fold_sizes(plan);
        const auto pos = fold_positives(plan, y);

        // Fold sizes and per-class counts within 1 of each other.
        const auto [smin, smax] = std::minmax_element(sizes.begin(), sizes.end());
        CHECK(*smax - *smin <= 1);
        const auto [pmin, pmax] = std::minmax_element(pos.begin(), pos.end());
        CHECK(*pmax - *pmin <= 1);

        for (std::size_t f = 0; f < k; ++f) {
            REQUIRE(sizes[f] > 0);
            const double fold_rate =
                static_cast<double>(pos[f]) / static_cast<double>(sizes[f]);
            CHECK(std::abs(fold_rate - global_rate) <=
                  1.0 / static_cast<double>(sizes[f]) + 1e-12);
        }
    }
}
