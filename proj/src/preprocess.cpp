#include "faultforge/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "faultforge/errors.hpp"
#include "faultforge/kernels.hpp"

namespace faultforge::preprocess {

ImputerModel fit_imputer(const Matrix& X_train, std::size_t k) {
    if (k < 1) throw Error("imputer k must be >= 1");
    const std::size_t p = X_train.cols();

    std::vector<std::size_t> observed(p, 0);
    std::vector<std::size_t> complete;
    for (std::size_t i = 0; i < X_train.rows(); ++i) {
        bool all = true;
        for (std::size_t j = 0; j < p; ++j) {
            if (is_missing(X_train.at(i, j)))
                all = false;
            else
                ++observed[j];
        }
        if (all) complete.push_back(i);
    }
    for (std::size_t j = 0; j < p; ++j)
        if (observed[j] == 0)
            throw UnimputableFeatureError("feature " + std::to_string(j) +
                                          " is missing in every training row");
    if (complete.size() < k)
        throw Error("imputer needs at least k=" + std::to_string(k) +
                    " complete training rows, found " + std::to_string(complete.size()));

    ImputerModel m;
    m.k = k;
    m.reference_rows = X_train.gather_rows(complete);
    m.feature_means.assign(p, 0.0);
    for (std::size_t i = 0; i < m.reference_rows.rows(); ++i)
        for (std::size_t j = 0; j < p; ++j) m.feature_means[j] += m.reference_rows.at(i, j);
    for (double& v : m.feature_means) v /= static_cast<double>(m.reference_rows.rows());
    return m;
}

Matrix apply_imputer(const ImputerModel& m, const Matrix& X) {
    if (X.cols() != m.reference_rows.cols()) throw Error("imputer column count mismatch");
    Matrix out = X;

    std::vector<std::size_t> incomplete;
    for (std::size_t i = 0; i < X.rows(); ++i)
        for (std::size_t j = 0; j < X.cols(); ++j)
            if (is_missing(X.at(i, j))) {
                incomplete.push_back(i);
                break;
            }
    if (incomplete.empty()) return out;

    const Matrix queries = X.gather_rows(incomplete);
    const Matrix dists = kernels::partial_sq_dists(queries, m.reference_rows);

    for (std::size_t q = 0; q < incomplete.size(); ++q) {
        const std::size_t i = incomplete[q];
        std::vector<double> drow(dists.row(q).begin(), dists.row(q).end());
        const bool no_overlap =
            std::all_of(drow.begin(), drow.end(), [](double v) { return std::isinf(v); });
        std::vector<std::size_t> nn;
        if (!no_overlap) nn = kernels::k_smallest(drow, m.k, drow.size());
        for (std::size_t j = 0; j < X.cols(); ++j) {
            if (!is_missing(X.at(i, j))) continue;
            if (no_overlap) {
                // Row observed nowhere: fall back to reference means.
                out.at(i, j) = m.feature_means[j];
                continue;
            }
            double acc = 0.0;
            for (std::size_t r : nn) acc += m.reference_rows.at(r, j);
            out.at(i, j) = acc / static_cast<double>(nn.size());
        }
    }
    return out;
}

ScalerModel fit_scaler(const Matrix& X_train) {
    if (X_train.rows() == 0) throw Error("cannot fit scaler on an empty matrix");
    ScalerModel s;
    s.min.assign(X_train.cols(), 0.0);
    s.max.assign(X_train.cols(), 0.0);
    for (std::size_t j = 0; j < X_train.cols(); ++j) {
        double lo = X_train.at(0, j), hi = X_train.at(0, j);
        for (std::size_t i = 0; i < X_train.rows(); ++i) {
            const double v = X_train.at(i, j);
            if (is_missing(v)) throw Error("scaler input contains missing cells; impute first");
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        s.min[j] = lo;
        s.max[j] = hi;
    }
    return s;
}

Matrix apply_scaler(const ScalerModel& s, const Matrix& X) {
    if (X.cols() != s.min.size()) throw Error("scaler column count mismatch");
    Matrix out(X.rows(), X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j) {
        const double lo = s.min[j];
        const double range = s.max[j] - lo;
        for (std::size_t i = 0; i < X.rows(); ++i) {
            if (range == 0.0) {
                out.at(i, j) = 0.0;  // constant feature carries no information
                continue;
            }
            out.at(i, j) = std::clamp((X.at(i, j) - lo) / range, 0.0, 1.0);
        }
    }
    return out;
}

}  // namespace faultforge::preprocess
