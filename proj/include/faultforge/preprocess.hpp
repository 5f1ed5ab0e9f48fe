#pragma once

#include <vector>

#include "faultforge/dataset.hpp"

namespace faultforge::preprocess {

// K-nearest-neighbor imputer. Fitting keeps the complete-cased training rows
// as the reference set; applying fills each missing cell with the unweighted
// mean of that feature over the k nearest references, where distance is
// Euclidean over co-observed dimensions rescaled by sqrt(p / #co-observed).
struct ImputerModel {
    std::size_t k = 5;
    Matrix reference_rows;               // complete rows only
    std::vector<double> feature_means;   // over reference rows, fallback for all-missing queries
};

ImputerModel fit_imputer(const Matrix& X_train, std::size_t k = 5);
Matrix apply_imputer(const ImputerModel& m, const Matrix& X);

// Per-feature min-max rescaling to [0,1]. Constant features map to 0;
// out-of-range values at apply time are clipped.
struct ScalerModel {
    std::vector<double> min;
    std::vector<double> max;
};

ScalerModel fit_scaler(const Matrix& X_train);
Matrix apply_scaler(const ScalerModel& s, const Matrix& X);

}  // namespace faultforge::preprocess
