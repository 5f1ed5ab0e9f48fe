#pragma once

#include <optional>
#include <vector>

#include "faultforge/dataset.hpp"

namespace faultforge::classifiers {

enum class Kernel { Linear, Rbf };

struct SvmParams {
    double C = 1.0;
    Kernel kernel = Kernel::Rbf;
    std::optional<double> gamma;  // empty = "scale" = 1 / (p * Var(X))
    double tol = 1e-3;
    long max_passes = 10;  // consecutive clean sweeps required for convergence
};

struct SvmModel {
    Matrix support_vectors;
    std::vector<double> alphas;  // 0 < alpha_i <= C
    std::vector<int> sv_labels;  // +1 / -1
    double b = 0.0;
    Kernel kernel = Kernel::Rbf;
    double gamma = 0.0;  // resolved value; unused by the linear kernel
    double C = 0.0;

    std::size_t n_support() const { return alphas.size(); }
};

// Soft-margin dual solved by SMO with pairwise alpha updates and a full
// error cache; converges when max_passes consecutive full sweeps find no
// KKT violation beyond tol. Labels arrive as {0,1} and are mapped to -1/+1.
SvmModel train_svm(const Matrix& X, const std::vector<int>& y, const SvmParams& p);

// Decision values f(x) = sum_i alpha_i y_i k(x_i, x) + b.
std::vector<double> svm_decision(const SvmModel& m, const Matrix& X);
std::vector<double> svm_decision_serial(const SvmModel& m, const Matrix& X);

// sign(f); f == 0 maps to +1, reported as label 1.
std::vector<int> predict_svm(const SvmModel& m, const Matrix& X);

double resolve_gamma(const SvmParams& p, const Matrix& X);

}  // namespace faultforge::classifiers
