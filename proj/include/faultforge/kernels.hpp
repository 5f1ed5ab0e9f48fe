#pragma once

#include <cstddef>
#include <vector>

#include "faultforge/dataset.hpp"

// Data-parallel inner loops shared by the imputer, the resampler and the
// SVM. Each kernel has a serial reference implementation and an OpenMP
// variant; the two must produce bit-identical output (every output element
// is written independently, no reductions), which tests assert and
// benchmarks/bench_kernels measures.
namespace faultforge::kernels {

// Squared Euclidean distances between all rows of a and b: out(i,j) = |a_i - b_j|^2.
Matrix pairwise_sq_dists_serial(const Matrix& a, const Matrix& b);
Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b);

// Partial squared distance for rows with missing cells: the squared distance
// over co-observed dimensions, rescaled by cols/#co-observed. A pair with no
// co-observed dimension gets +infinity.
Matrix partial_sq_dists_serial(const Matrix& queries, const Matrix& refs);
Matrix partial_sq_dists(const Matrix& queries, const Matrix& refs);

// RBF kernel block: out(i,j) = exp(-gamma * |a_i - b_j|^2).
Matrix rbf_kernel_serial(const Matrix& a, const Matrix& b, double gamma);
Matrix rbf_kernel(const Matrix& a, const Matrix& b, double gamma);

// Indices of the k smallest entries of dists, ties broken by lower index;
// exclude marks one index to skip (pass size or larger to keep all).
std::vector<std::size_t> k_smallest(const std::vector<double>& dists, std::size_t k,
                                    std::size_t exclude);

}  // namespace faultforge::kernels
