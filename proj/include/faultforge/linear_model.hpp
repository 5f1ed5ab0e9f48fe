#pragma once

#include <vector>

#include "faultforge/dataset.hpp"

namespace faultforge::classifiers {

enum class Penalty { L1, L2 };

struct LrParams {
    double C = 1.0;  // inverse regularization strength
    Penalty penalty = Penalty::L2;
    double tol = 1e-6;
    long max_iter = 5000;
};

struct LinearModel {
    double beta0 = 0.0;
    std::vector<double> beta;
};

// Mean negative log-likelihood plus the per-sample penalty
// (1/(C*n)) * [ 0.5*|beta|^2 | |beta|_1 ]; the intercept is never penalized. L2 is solved by gradient descent with
// backtracking line search, L1 by proximal gradient with soft-thresholding.
// Throws ConvergenceError when max_iter is hit before the objective decrease
// drops below tol.
LinearModel train_lr(const Matrix& X, const std::vector<int>& y, const LrParams& p);

double predict_proba_one(const LinearModel& m, std::span<const double> x);
std::vector<double> predict_proba(const LinearModel& m, const Matrix& X);
std::vector<int> predict_lr(const LinearModel& m, const Matrix& X, double threshold = 0.5);

// Objective and gradient of the smooth part (mean NLL, no penalty), exposed
// for gradient checks. grad has beta0's slot at index 0, features after it.
double lr_nll(const Matrix& X, const std::vector<int>& y, const LinearModel& m);
std::vector<double> lr_nll_gradient(const Matrix& X, const std::vector<int>& y,
                                    const LinearModel& m);

}  // namespace faultforge::classifiers
