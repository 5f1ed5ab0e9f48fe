#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "faultforge/errors.hpp"
#include "faultforge/evaluation.hpp"
#include "faultforge/rng.hpp"

using namespace faultforge;
using evaluation::ConfusionMatrix;

TEST_CASE("confusion counts the four cells") {
    auto cm = evaluation::confusion({1, 0, 1}, {1, 0, 1});
    CHECK(cm.tp == 2);
    CHECK(cm.tn == 1);
    CHECK(cm.fp == 0);
    CHECK(cm.fn == 0);

    cm = evaluation::confusion({1, 1, 0}, {0, 0, 0});
    CHECK(cm.tp == 0);
    CHECK(cm.fn == 2);
    CHECK(cm.tn == 1);
    CHECK(cm.fp == 0);

    cm = evaluation::confusion({}, {});
    CHECK(cm.total() == 0);

    CHECK_THROWS_AS(evaluation::confusion({1}, {1, 0}), Error);
}

TEST_CASE("metrics from a worked confusion matrix") {
    const auto m = evaluation::metrics({50, 30, 10, 10});
    CHECK(m.accuracy == doctest::Approx(0.80));
    CHECK(m.precision == 50.0 / 60.0);
    CHECK(m.recall == 50.0 / 60.0);
    CHECK(m.f1 == doctest::Approx(50.0 / 60.0));
}

TEST_CASE("f1 equals precision when precision equals recall") {
    const auto m = evaluation::metrics({30, 20, 15, 15});  // precision = recall = 2/3
    CHECK(m.precision == doctest::Approx(m.recall));
    CHECK(m.f1 == doctest::Approx(m.precision));
}

TEST_CASE("undefined precision/recall convention: zero with flags") {
    const auto m = evaluation::metrics({0, 5, 0, 3});
    CHECK(m.precision == 0.0);
    CHECK(m.precision_undefined);
    CHECK(m.recall == 0.0);
    CHECK_FALSE(m.recall_undefined);
    CHECK(m.f1 == 0.0);

    const auto r = evaluation::metrics({0, 5, 2, 0});
    CHECK(r.recall == 0.0);
    CHECK(r.recall_undefined);

    CHECK_THROWS_AS(evaluation::metrics({0, 0, 0, 0}), Error);
}

TEST_CASE("perfect prediction gives accuracy 1") {
    const std::vector<int> y = {1, 0, 0, 1, 1};
    CHECK(evaluation::metrics(evaluation::confusion(y, y)).accuracy == 1.0);
}

TEST_CASE("metrics match exact rational arithmetic on 50 random matrices") {
    rng::Engine eng(99);
    for (int trial = 0; trial < 50; ++trial) {
        ConfusionMatrix cm{eng.below(200), eng.below(200), eng.below(200), eng.below(200)};
        if (cm.total() == 0) cm.tp = 1;
        const auto m = evaluation::metrics(cm);

        // Expected values as correctly rounded ratios of exact integers.
        const auto ratio = [](std::size_t num, std::size_t den) {
            return static_cast<double>(num) / static_cast<double>(den);
        };
        CHECK(m.accuracy == ratio(cm.tp + cm.tn, cm.total()));
        if (cm.tp + cm.fp > 0) CHECK(m.precision == ratio(cm.tp, cm.tp + cm.fp));
        if (cm.tp + cm.fn > 0) CHECK(m.recall == ratio(cm.tp, cm.tp + cm.fn));

        // Label-swap duality: precision of the swapped problem is the
        // negative predictive value tn/(tn+fn) of the original.
        const ConfusionMatrix swapped{cm.tn, cm.tp, cm.fn, cm.fp};
        const auto ms = evaluation::metrics(swapped);
        if (cm.tn + cm.fn > 0) CHECK(ms.precision == ratio(cm.tn, cm.tn + cm.fn));

        // F1 bounded by min and max of precision/recall when both positive.
        if (m.precision > 0.0 && m.recall > 0.0) {
            CHECK(m.f1 >= std::min(m.precision, m.recall) - 1e-15);
            CHECK(m.f1 <= std::max(m.precision, m.recall) + 1e-15);
        }
    }
}

TEST_CASE("aggregate means, population stds and summed timings") {
    evaluation::FoldMetrics a;
    a.accuracy = 0.8;
    a.precision = 0.7;
    a.recall = 0.6;
    a.f1 = 0.65;
    a.train_seconds = 1.5;
    a.test_seconds = 0.25;
    evaluation::FoldMetrics b = a;
    b.accuracy = 0.9;

    const auto rep = evaluation::aggregate({a, b});
    CHECK(rep.accuracy.mean == doctest::Approx(0.85));
    CHECK(rep.accuracy.stddev == doctest::Approx(0.05));
    CHECK(rep.train_seconds_total == doctest::Approx(3.0));
    CHECK(rep.test_seconds_total == doctest::Approx(0.5));

    const auto one = evaluation::aggregate({a});
    CHECK(one.accuracy.mean == a.accuracy);
    CHECK(one.accuracy.stddev == 0.0);

    const auto same = evaluation::aggregate({a, a, a});
    CHECK(same.accuracy.stddev == 0.0);

    CHECK_THROWS_AS(evaluation::aggregate({}), Error);
}
