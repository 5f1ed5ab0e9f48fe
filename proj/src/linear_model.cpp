#include "faultforge/linear_model.hpp"

#include <algorithm>
#include <cmath>

#include "faultforge/errors.hpp"

namespace faultforge::classifiers {

namespace {

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) - y*z, computed without overflow.
inline double nll_term(double z, int y) {
    const double soft = z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    return soft - static_cast<double>(y) * z;
}

// Penalty per training sample, the liblinear convention: against the mean
// NLL the effective strength is 1/(C*n).
double penalty_of(const std::vector<double>& beta, const LrParams& p, std::size_t n) {
    double acc = 0.0;
    if (p.penalty == Penalty::L2) {
        for (double b : beta) acc += b * b;
        return 0.5 * acc / (p.C * static_cast<double>(n));
    }
    for (double b : beta) acc += std::abs(b);
    return acc / (p.C * static_cast<double>(n));
}

inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

}  // namespace

double lr_nll(const Matrix& X, const std::vector<int>& y, const LinearModel& m) {
    double acc = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double z = m.beta0;
        const double* row = X.row(i).data();
        for (std::size_t j = 0; j < X.cols(); ++j) z += row[j] * m.beta[j];
        acc += nll_term(z, y[i]);
    }
    return acc / static_cast<double>(X.rows());
}

std::vector<double> lr_nll_gradient(const Matrix& X, const std::vector<int>& y,
                                    const LinearModel& m) {
    std::vector<double> grad(X.cols() + 1, 0.0);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double z = m.beta0;
        const double* row = X.row(i).data();
        for (std::size_t j = 0; j < X.cols(); ++j) z += row[j] * m.beta[j];
        const double resid = sigmoid(z) - static_cast<double>(y[i]);
        grad[0] += resid;
        for (std::size_t j = 0; j < X.cols(); ++j) grad[j + 1] += resid * row[j];
    }
    const double n = static_cast<double>(X.rows());
    for (double& g : grad) g /= n;
    return grad;
}

LinearModel train_lr(const Matrix& X, const std::vector<int>& y, const LrParams& p) {
    if (X.rows() == 0 || X.rows() != y.size()) throw Error("train_lr: bad input shape");
    if (!(p.C > 0.0)) throw Error("train_lr: C must be positive");

    LinearModel m;
    m.beta.assign(X.cols(), 0.0);

    const double lambda = 1.0 / (p.C * static_cast<double>(X.rows()));
    auto objective = [&](const LinearModel& cand) {
        return lr_nll(X, y, cand) + penalty_of(cand.beta, p, X.rows());
    };

    double obj = objective(m);
    double step = 1.0;
    for (long iter = 0; iter < p.max_iter; ++iter) {
        const std::vector<double> grad = lr_nll_gradient(X, y, m);

        LinearModel next = m;
        double next_obj = 0.0;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            if (p.penalty == Penalty::L2) {
                next.beta0 = m.beta0 - step * grad[0];
                for (std::size_t j = 0; j < m.beta.size(); ++j)
                    next.beta[j] = m.beta[j] - step * (grad[j + 1] + lambda * m.beta[j]);
            } else {
                next.beta0 = m.beta0 - step * grad[0];
                for (std::size_t j = 0; j < m.beta.size(); ++j)
                    next.beta[j] = soft_threshold(m.beta[j] - step * grad[j + 1], step * lambda);
            }
            next_obj = objective(next);
            if (next_obj <= obj) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) return m;  // step vanished: at numerical optimum

        const double decrease = obj - next_obj;
        m = next;
        obj = next_obj;
        step = std::min(step * 1.25, 64.0);
        if (decrease < p.tol) return m;
    }
    throw ConvergenceError("logistic regression did not converge", p.max_iter, obj);
}

double predict_proba_one(const LinearModel& m, std::span<const double> x) {
    double z = m.beta0;
    for (std::size_t j = 0; j < m.beta.size(); ++j) z += x[j] * m.beta[j];
    return sigmoid(z);
}

std::vector<double> predict_proba(const LinearModel& m, const Matrix& X) {
    if (X.cols() != m.beta.size()) throw Error("predict_lr: column count mismatch");
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = predict_proba_one(m, X.row(i));
    return out;
}

std::vector<int> predict_lr(const LinearModel& m, const Matrix& X, double threshold) {
    const std::vector<double> proba = predict_proba(m, X);
    std::vector<int> labels(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) labels[i] = proba[i] >= threshold ? 1 : 0;
    return labels;
}

}  // namespace faultforge::classifiers
