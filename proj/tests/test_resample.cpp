#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "faultforge/resample.hpp"
#include "test_support.hpp"

using namespace faultforge;
using test_support::matrix_of;

namespace {

// Every synthetic point must be a convex combination of two original
// minority points with one shared lambda across dimensions.
bool is_convex_combination(std::span<const double> s, const Matrix& X,
                           const std::vector<std::size_t>& minority_rows) {
    for (std::size_t a : minority_rows) {
        for (std::size_t z : minority_rows) {
            double lambda = -1.0;
            bool ok = true;
            for (std::size_t d = 0; d < X.cols() && ok; ++d) {
                const double xa = X.at(a, d), xz = X.at(z, d);
                const double denom = xz - xa;
                if (std::abs(denom) < 1e-12) {
                    if (std::abs(s[d] - xa) > 1e-9) ok = false;
                    continue;
                }
                const double l = (s[d] - xa) / denom;
                if (l < -1e-9 || l > 1.0 + 1e-9) ok = false;
                else if (lambda < 0.0) lambda = l;
                else if (std::abs(l - lambda) > 1e-6) ok = false;
            }
            if (ok) return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("balanced input is a no-op") {
    const Matrix X = matrix_of({{0.0}, {1.0}, {2.0}, {3.0}});
    const std::vector<int> y = {0, 0, 1, 1};
    const auto res = resample::adasyn(X, y, {5, 1.0, 1});
    CHECK(res.synthetic_count == 0);
    CHECK(res.X == X);
    CHECK(res.y == y);
    CHECK_FALSE(res.single_class_warning);
}

TEST_CASE("minority far from majority: uniform fallback, synthetics on the segment") {
    // Majority cluster around (10,10); two minority points at (0,0) and (1,1).
    const Matrix X = matrix_of({{10.0, 10.0},
                                {10.5, 10.0},
                                {10.0, 10.5},
                                {10.5, 10.5},
                                {0.0, 0.0},
                                {1.0, 1.0}});
    const std::vector<int> y = {0, 0, 0, 0, 1, 1};
    resample::AdasynConfig cfg;
    cfg.k_neighbors = 1;  // each minority point's nearest neighbor is the other minority point
    cfg.seed = 9;
    const auto res = resample::adasyn(X, y, cfg);
    CHECK(res.synthetic_count == 2);
    REQUIRE(res.X.rows() == 8);
    for (std::size_t i = 6; i < 8; ++i) {
        CHECK(res.y[i] == 1);
        // On the segment between (0,0) and (1,1): equal coordinates in [0,1].
        CHECK(res.X.at(i, 0) == doctest::Approx(res.X.at(i, 1)));
        CHECK(res.X.at(i, 0) >= 0.0);
        CHECK(res.X.at(i, 0) <= 1.0);
    }
}

TEST_CASE("fixed seed reproduces bit-identical output") {
    const Matrix X = test_support::random_matrix(40, 3, 5);
    std::vector<int> y(40, 0);
    for (std::size_t i = 0; i < 12; ++i) y[i] = 1;
    const auto a = resample::adasyn(X, y, {5, 1.0, 77});
    const auto b = resample::adasyn(X, y, {5, 1.0, 77});
    CHECK(a.X == b.X);
    CHECK(a.y == b.y);
    const auto c = resample::adasyn(X, y, {5, 1.0, 78});
    CHECK(a.X.data() != c.X.data());
}

TEST_CASE("single-class input is returned unchanged with a warning") {
    const Matrix X = matrix_of({{0.0}, {1.0}});
    const auto res = resample::adasyn(X, {1, 1}, {5, 1.0, 1});
    CHECK(res.single_class_warning);
    CHECK(res.X == X);
}

TEST_CASE("a lone minority point is duplicated G times") {
    const Matrix X = matrix_of({{0.0}, {5.0}, {6.0}, {7.0}, {8.0}});
    const std::vector<int> y = {1, 0, 0, 0, 0};
    const auto res = resample::adasyn(X, y, {5, 1.0, 3});
    CHECK(res.synthetic_count == 3);
    REQUIRE(res.X.rows() == 8);
    for (std::size_t i = 5; i < 8; ++i) {
        CHECK(res.X.at(i, 0) == 0.0);
        CHECK(res.y[i] == 1);
    }
}

TEST_CASE("properties over 100 random instances") {
    rng::Engine eng(31337);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 12 + eng.below(60);
        const std::size_t p = 1 + eng.below(5);
        const std::size_t minority = 2 + eng.below(n / 3);
        Matrix X(n, p);
        for (double& v : X.data()) v = eng.uniform();
        std::vector<int> y(n, 0);
        for (std::size_t i = 0; i < minority; ++i) y[i] = 1;

        resample::AdasynConfig cfg;
        cfg.k_neighbors = 1 + eng.below(7);
        cfg.balance_target = 0.25 + 0.75 * eng.uniform();
        cfg.seed = eng.next();
        const auto res = resample::adasyn(X, y, cfg);

        // Original rows unchanged as a prefix.
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(res.y[i] == y[i]);
            for (std::size_t d = 0; d < p; ++d) CHECK(res.X.at(i, d) == X.at(i, d));
        }

        // Class-balance bound: minority + G within 1 of the target.
        const std::size_t majority = n - minority;
        const double target = static_cast<double>(majority - minority) * cfg.balance_target;
        CHECK(std::abs(static_cast<double>(res.synthetic_count) - target) <= 0.5 + 1e-9);

        // Synthetic rows carry the minority label and are convex combinations.
        std::vector<std::size_t> minority_rows;
        for (std::size_t i = 0; i < n; ++i)
            if (y[i] == 1) minority_rows.push_back(i);
        for (std::size_t i = n; i < res.X.rows(); ++i) {
            CHECK(res.y[i] == 1);
            CHECK(is_convex_combination(res.X.row(i), X, minority_rows));
        }

        // Determinism.
        const auto again = resample::adasyn(X, y, cfg);
        CHECK(again.X == res.X);
    }
}
