#pragma once

#include <cstdint>
#include <vector>

#include "faultforge/dataset.hpp"

namespace faultforge::resample {

struct AdasynConfig {
    std::size_t k_neighbors = 5;
    double balance_target = 1.0;  // fraction of the class gap to close, in (0,1]
    std::uint64_t seed = 0;
};

struct AdasynResult {
    Matrix X;
    std::vector<int> y;
    std::size_t synthetic_count = 0;
    bool single_class_warning = false;  // input had one class; output is a copy
};

// Adaptive synthetic oversampling of the minority class. Original rows are
// an unchanged prefix of the output; synthetics interpolate between minority
// points and carry the minority label.
AdasynResult adasyn(const Matrix& X, const std::vector<int>& y, const AdasynConfig& cfg);

}  // namespace faultforge::resample
