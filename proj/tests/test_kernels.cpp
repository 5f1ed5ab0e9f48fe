#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "faultforge/kernels.hpp"
#include "test_support.hpp"

using namespace faultforge;
using test_support::matrix_of;
using test_support::random_matrix;

TEST_CASE("pairwise squared distances, serial and parallel agree bit for bit") {
    const Matrix a = random_matrix(37, 6, 1);
    const Matrix b = random_matrix(53, 6, 2);
    CHECK(kernels::pairwise_sq_dists_serial(a, b) == kernels::pairwise_sq_dists(a, b));
}

TEST_CASE("pairwise squared distances, hand case") {
    const Matrix a = matrix_of({{0.0, 0.0}});
    const Matrix b = matrix_of({{3.0, 4.0}, {1.0, 1.0}});
    const Matrix d = kernels::pairwise_sq_dists(a, b);
    CHECK(d.at(0, 0) == doctest::Approx(25.0));
    CHECK(d.at(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("partial distances rescale by observed dimension count") {
    Matrix q = matrix_of({{Matrix::missing(), 2.0}});
    const Matrix refs = matrix_of({{0.0, 0.0}, {2.0, 2.0}, {4.0, 4.0}});
    const Matrix d = kernels::partial_sq_dists(q, refs);
    // Only the second coordinate is co-observed; scale = p/#co = 2.
    CHECK(d.at(0, 0) == doctest::Approx(8.0));
    CHECK(d.at(0, 1) == doctest::Approx(0.0));
    CHECK(d.at(0, 2) == doctest::Approx(8.0));

    const Matrix all_missing = matrix_of({{Matrix::missing(), Matrix::missing()}});
    const Matrix d2 = kernels::partial_sq_dists(all_missing, refs);
    CHECK(std::isinf(d2.at(0, 0)));
}

TEST_CASE("partial distances, serial and parallel agree on random masked input") {
    Matrix q = random_matrix(25, 7, 3);
    rng::Engine eng(4);
    for (double& v : q.data())
        if (eng.uniform() < 0.2) v = Matrix::missing();
    const Matrix refs = random_matrix(40, 7, 5);
    CHECK(kernels::partial_sq_dists_serial(q, refs) == kernels::partial_sq_dists(q, refs));
}

TEST_CASE("rbf kernel values and parallel equality") {
    const Matrix a = matrix_of({{0.0, 0.0}});
    const Matrix b = matrix_of({{1.0, 0.0}});
    CHECK(kernels::rbf_kernel(a, b, 2.0).at(0, 0) == doctest::Approx(std::exp(-2.0)));

    const Matrix x = random_matrix(31, 5, 6);
    const Matrix z = random_matrix(29, 5, 7);
    CHECK(kernels::rbf_kernel_serial(x, z, 0.7) == kernels::rbf_kernel(x, z, 0.7));
}

TEST_CASE("k smallest breaks ties toward the lower index and can exclude one entry") {
    const std::vector<double> d = {5.0, 1.0, 3.0, 3.0, 0.5};
    const auto top = kernels::k_smallest(d, 3, 4);  // exclude the 0.5
    REQUIRE(top.size() == 3);
    CHECK(top[0] == 1);
    CHECK(top[1] == 2);  // tie 3.0 vs 3.0 -> lower index first
    CHECK(top[2] == 3);

    const auto all = kernels::k_smallest(d, 10, d.size());
    CHECK(all.size() == d.size());
}
