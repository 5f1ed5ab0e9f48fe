#include "faultforge/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace faultforge::kernels {

namespace {

inline double sq_dist(const double* x, const double* z, std::size_t p) {
    double acc = 0.0;
    for (std::size_t d = 0; d < p; ++d) {
        const double diff = x[d] - z[d];
        acc += diff * diff;
    }
    return acc;
}

// Distance over dimensions observed in both rows, rescaled to the full
// dimension count so rows with few observed cells stay comparable.
inline double partial_sq_dist(const double* x, const double* z, std::size_t p) {
    double acc = 0.0;
    std::size_t seen = 0;
    for (std::size_t d = 0; d < p; ++d) {
        if (std::isnan(x[d]) || std::isnan(z[d])) continue;
        const double diff = x[d] - z[d];
        acc += diff * diff;
        ++seen;
    }
    if (seen == 0) return std::numeric_limits<double>::infinity();
    return acc * (static_cast<double>(p) / static_cast<double>(seen));
}

}  // namespace

Matrix pairwise_sq_dists_serial(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            out.at(i, j) = sq_dist(a.row(i).data(), b.row(j).data(), a.cols());
    return out;
}

Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.rows());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            out.at(static_cast<std::size_t>(i), j) =
                sq_dist(a.row(static_cast<std::size_t>(i)).data(), b.row(j).data(), a.cols());
    return out;
}

Matrix partial_sq_dists_serial(const Matrix& queries, const Matrix& refs) {
    Matrix out(queries.rows(), refs.rows());
    for (std::size_t i = 0; i < queries.rows(); ++i)
        for (std::size_t j = 0; j < refs.rows(); ++j)
            out.at(i, j) = partial_sq_dist(queries.row(i).data(), refs.row(j).data(), queries.cols());
    return out;
}

Matrix partial_sq_dists(const Matrix& queries, const Matrix& refs) {
    Matrix out(queries.rows(), refs.rows());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(queries.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < refs.rows(); ++j)
            out.at(static_cast<std::size_t>(i), j) =
                partial_sq_dist(queries.row(static_cast<std::size_t>(i)).data(), refs.row(j).data(),
                                queries.cols());
    return out;
}

Matrix rbf_kernel_serial(const Matrix& a, const Matrix& b, double gamma) {
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            out.at(i, j) = std::exp(-gamma * sq_dist(a.row(i).data(), b.row(j).data(), a.cols()));
    return out;
}

Matrix rbf_kernel(const Matrix& a, const Matrix& b, double gamma) {
    Matrix out(a.rows(), b.rows());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < b.rows(); ++j)
            out.at(static_cast<std::size_t>(i), j) =
                std::exp(-gamma * sq_dist(a.row(static_cast<std::size_t>(i)).data(), b.row(j).data(),
                                          a.cols()));
    return out;
}

std::vector<std::size_t> k_smallest(const std::vector<double>& dists, std::size_t k,
                                    std::size_t exclude) {
    std::vector<std::size_t> order;
    order.reserve(dists.size());
    for (std::size_t i = 0; i < dists.size(); ++i)
        if (i != exclude) order.push_back(i);
    k = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t x, std::size_t z) {
                          if (dists[x] != dists[z]) return dists[x] < dists[z];
                          return x < z;
                      });
    order.resize(k);
    return order;
}

}  // namespace faultforge::kernels
