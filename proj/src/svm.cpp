#include "faultforge/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "faultforge/errors.hpp"

namespace faultforge::classifiers {

namespace {

// On-demand kernel rows with a fixed-budget LRU cache.
class KernelCache {
public:
    KernelCache(const Matrix& X, Kernel kind, double gamma, std::size_t budget_bytes)
        : X_(X), kind_(kind), gamma_(gamma), n_(X.rows()) {
        slots_ = std::max<std::size_t>(2, budget_bytes / (sizeof(double) * std::max<std::size_t>(n_, 1)));
        slots_ = std::min(slots_, n_);
        storage_.assign(slots_ * n_, 0.0);
        slot_of_.assign(n_, -1);
        row_of_.assign(slots_, -1);
        stamp_of_.assign(slots_, 0);
        if (kind_ == Kernel::Linear) {
            diag_.resize(n_);
            for (std::size_t i = 0; i < n_; ++i) {
                double acc = 0.0;
                for (double v : X.row(i)) acc += v * v;
                diag_[i] = acc;
            }
        } else {
            diag_.assign(n_, 1.0);
        }
    }

    double diag(std::size_t i) const { return diag_[i]; }

    const double* row(std::size_t i) {
        if (slot_of_[i] >= 0) {
            const std::size_t s = static_cast<std::size_t>(slot_of_[i]);
            stamp_of_[s] = ++clock_;
            return storage_.data() + s * n_;
        }
        std::size_t victim = 0;
        for (std::size_t s = 1; s < slots_; ++s)
            if (stamp_of_[s] < stamp_of_[victim]) victim = s;
        if (row_of_[victim] >= 0) slot_of_[static_cast<std::size_t>(row_of_[victim])] = -1;
        row_of_[victim] = static_cast<int>(i);
        slot_of_[i] = static_cast<int>(victim);
        stamp_of_[victim] = ++clock_;

        double* dst = storage_.data() + victim * n_;
        const double* xi = X_.row(i).data();
        const std::size_t p = X_.cols();
        if (kind_ == Kernel::Linear) {
            for (std::size_t j = 0; j < n_; ++j) {
                const double* xj = X_.row(j).data();
                double acc = 0.0;
                for (std::size_t d = 0; d < p; ++d) acc += xi[d] * xj[d];
                dst[j] = acc;
            }
        } else {
            for (std::size_t j = 0; j < n_; ++j) {
                const double* xj = X_.row(j).data();
                double acc = 0.0;
                for (std::size_t d = 0; d < p; ++d) {
                    const double diff = xi[d] - xj[d];
                    acc += diff * diff;
                }
                dst[j] = std::exp(-gamma_ * acc);
            }
        }
        return dst;
    }

private:
    const Matrix& X_;
    Kernel kind_;
    double gamma_;
    std::size_t n_;
    std::size_t slots_;
    std::vector<double> storage_;
    std::vector<double> diag_;
    std::vector<int> slot_of_;
    std::vector<int> row_of_;
    std::vector<std::uint64_t> stamp_of_;
    std::uint64_t clock_ = 0;
};

struct Solver {
    const Matrix& X;
    const SvmParams& p;
    std::vector<int> y;  // +1/-1
    std::vector<double> alpha;
    std::vector<double> v;  // b-free decision values: v_k = sum_j alpha_j y_j K_jk
    double b = 0.0;
    KernelCache cache;

    Solver(const Matrix& X, const std::vector<int>& labels, const SvmParams& p, double gamma)
        : X(X), p(p), cache(X, p.kernel, gamma, 64 << 20) {
        y.resize(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == 1 ? 1 : -1;
        alpha.assign(X.rows(), 0.0);
        v.assign(X.rows(), 0.0);
    }

    // One full KKT scan: the bias must satisfy b >= t_k on the lower set and
    // b <= t_k on the upper set, with t_k = y_k - v_k; free points demand
    // both. The most violating pair is (argmax lower t, argmin upper t) and
    // the solution is feasible within tol when the gap closes.
    struct Scan {
        double m = -std::numeric_limits<double>::infinity();  // max lower bound on b
        double M = std::numeric_limits<double>::infinity();   // min upper bound on b
        std::size_t i = SIZE_MAX;                             // attains m
        std::size_t j = SIZE_MAX;                             // attains M
    };

    Scan scan_bounds() const {
        Scan s;
        for (std::size_t k = 0; k < alpha.size(); ++k) {
            const double t = static_cast<double>(y[k]) - v[k];
            const bool lower = (y[k] > 0 && alpha[k] < p.C) || (y[k] < 0 && alpha[k] > 0.0);
            const bool upper = (y[k] < 0 && alpha[k] < p.C) || (y[k] > 0 && alpha[k] > 0.0);
            if (lower && t > s.m) {
                s.m = t;
                s.i = k;
            }
            if (upper && t < s.M) {
                s.M = t;
                s.j = k;
            }
        }
        return s;
    }

    // Pairwise update of the most violating pair; E_i - E_j = t_j - t_i is
    // b-free. Returns false when no progress is possible.
    bool step(std::size_t i, std::size_t j) {
        if (i == j || i == SIZE_MAX || j == SIZE_MAX) return false;
        const double ai_old = alpha[i], aj_old = alpha[j];
        const int yi = y[i], yj = y[j];

        double lo, hi;
        if (yi != yj) {
            lo = std::max(0.0, aj_old - ai_old);
            hi = std::min(p.C, p.C + aj_old - ai_old);
        } else {
            lo = std::max(0.0, ai_old + aj_old - p.C);
            hi = std::min(p.C, ai_old + aj_old);
        }
        if (lo >= hi) return false;

        const double* ki = cache.row(i);
        const double kij = ki[j];
        double eta = cache.diag(i) + cache.diag(j) - 2.0 * kij;
        if (eta <= 0.0) eta = 1e-12;

        const double ei = v[i] - static_cast<double>(yi);
        const double ej = v[j] - static_cast<double>(yj);
        double aj = aj_old + yj * (ei - ej) / eta;
        aj = std::clamp(aj, lo, hi);
        if (aj == aj_old) return false;
        double ai = ai_old + yi * yj * (aj_old - aj);

        // Snap sub-ulp bound residues (which would poison the working-set
        // selection) and restore the pair's conserved sum exactly.
        const double snap = 1e-12 * std::max(1.0, p.C);
        auto snapped = [&](double a) {
            if (a < snap) return 0.0;
            if (a > p.C - snap) return p.C;
            return a;
        };
        const double ai_s = snapped(ai);
        if (ai_s != ai) {
            const double aj_fix =
                yi == yj ? (ai_old + aj_old) - ai_s : ai_s - (ai_old - aj_old);
            if (aj_fix >= 0.0 && aj_fix <= p.C) {
                ai = ai_s;
                aj = aj_fix;
            }
        }
        const double aj_s = snapped(aj);
        if (aj_s != aj) {
            const double ai_fix =
                yi == yj ? (ai_old + aj_old) - aj_s : aj_s + (ai_old - aj_old);
            if (ai_fix >= 0.0 && ai_fix <= p.C) {
                aj = aj_s;
                ai = ai_fix;
            }
        }
        if (aj == aj_old) return false;

        const double di = yi * (ai - ai_old);
        const double dj = yj * (aj - aj_old);
        const double* kj = cache.row(j);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] += di * ki[k] + dj * kj[k];
        alpha[i] = ai;
        alpha[j] = aj;
        return true;
    }

    void solve() {
        const std::size_t n = alpha.size();
        const long iter_cap = std::max<long>(200000, static_cast<long>(60 * n));
        long iters = 0;
        long clean = 0;
        while (clean < p.max_passes) {
            const Scan s = scan_bounds();
            if (s.m - s.M <= p.tol) {
                // Feasible bias found; re-verify until the pass budget is met.
                ++clean;
                continue;
            }
            clean = 0;
            bool progressed = ++iters <= iter_cap && step(s.i, s.j);
            if (!progressed && iters <= iter_cap) {
                // Deterministic fallback when the extreme pair cannot move.
                for (std::size_t k = 0; k < n && !progressed; ++k) {
                    const bool upper =
                        (y[k] < 0 && alpha[k] < p.C) || (y[k] > 0 && alpha[k] > 0.0);
                    if (upper && k != s.i) progressed = step(s.i, k);
                }
                for (std::size_t k = 0; k < n && !progressed; ++k) {
                    const bool lower =
                        (y[k] > 0 && alpha[k] < p.C) || (y[k] < 0 && alpha[k] > 0.0);
                    if (lower && k != s.j) progressed = step(k, s.j);
                }
            }
            if (!progressed) {
                long violations = 0;
                const double mid = 0.5 * (s.m + s.M);
                for (std::size_t k = 0; k < n; ++k) {
                    const double yf = y[k] * (v[k] + mid);
                    if (alpha[k] <= 0.0 && yf < 1.0 - p.tol) ++violations;
                    if (alpha[k] >= p.C && yf > 1.0 + p.tol) ++violations;
                    if (alpha[k] > 0.0 && alpha[k] < p.C && std::abs(yf - 1.0) > p.tol)
                        ++violations;
                }
                throw ConvergenceError("SMO did not converge", iters,
                                       static_cast<double>(violations));
            }
        }
        const Scan s = scan_bounds();
        if (std::isfinite(s.m) && std::isfinite(s.M))
            b = 0.5 * (s.m + s.M);
        else if (std::isfinite(s.m))
            b = s.m;
        else
            b = s.M;
    }
};

}  // namespace

double resolve_gamma(const SvmParams& p, const Matrix& X) {
    if (p.gamma.has_value()) {
        if (!(*p.gamma > 0.0)) throw Error("svm: gamma must be positive");
        return *p.gamma;
    }
    // "scale": 1 / (p * Var(X)) over all matrix entries.
    double mean = 0.0;
    for (double v : X.data()) mean += v;
    mean /= static_cast<double>(X.data().size());
    double var = 0.0;
    for (double v : X.data()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(X.data().size());
    if (var <= 0.0) throw Error("svm: cannot resolve gamma=scale on a constant matrix");
    return 1.0 / (static_cast<double>(X.cols()) * var);
}

SvmModel train_svm(const Matrix& X, const std::vector<int>& y, const SvmParams& p) {
    if (X.rows() < 2 || X.rows() != y.size()) throw Error("train_svm: bad input shape");
    if (!(p.C > 0.0)) throw Error("train_svm: C must be positive");
    const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
    const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
    if (!has0 || !has1) throw Error("train_svm: both classes must be present");

    const double gamma = p.kernel == Kernel::Rbf ? resolve_gamma(p, X) : 0.0;
    Solver solver(X, y, p, gamma);
    solver.solve();

    SvmModel m;
    m.kernel = p.kernel;
    m.gamma = gamma;
    m.C = p.C;
    m.b = solver.b;
    std::vector<std::size_t> sv;
    for (std::size_t i = 0; i < solver.alpha.size(); ++i)
        if (solver.alpha[i] > 0.0) sv.push_back(i);
    if (sv.empty()) throw Error("train_svm: empty support set");
    m.support_vectors = X.gather_rows(sv);
    m.alphas.reserve(sv.size());
    m.sv_labels.reserve(sv.size());
    for (std::size_t i : sv) {
        m.alphas.push_back(solver.alpha[i]);
        m.sv_labels.push_back(solver.y[i]);
    }
    return m;
}

namespace {

double decision_one(const SvmModel& m, const double* x, std::size_t p) {
    double acc = 0.0;
    for (std::size_t s = 0; s < m.n_support(); ++s) {
        const double* v = m.support_vectors.row(s).data();
        double k;
        if (m.kernel == Kernel::Linear) {
            k = 0.0;
            for (std::size_t d = 0; d < p; ++d) k += v[d] * x[d];
        } else {
            double acc2 = 0.0;
            for (std::size_t d = 0; d < p; ++d) {
                const double diff = v[d] - x[d];
                acc2 += diff * diff;
            }
            k = std::exp(-m.gamma * acc2);
        }
        acc += m.alphas[s] * static_cast<double>(m.sv_labels[s]) * k;
    }
    return acc + m.b;
}

}  // namespace

std::vector<double> svm_decision_serial(const SvmModel& m, const Matrix& X) {
    if (X.cols() != m.support_vectors.cols()) throw Error("predict_svm: column count mismatch");
    std::vector<double> f(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i)
        f[i] = decision_one(m, X.row(i).data(), X.cols());
    return f;
}

std::vector<double> svm_decision(const SvmModel& m, const Matrix& X) {
    if (X.cols() != m.support_vectors.cols()) throw Error("predict_svm: column count mismatch");
    std::vector<double> f(X.rows());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(X.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        f[static_cast<std::size_t>(i)] =
            decision_one(m, X.row(static_cast<std::size_t>(i)).data(), X.cols());
    return f;
}

std::vector<int> predict_svm(const SvmModel& m, const Matrix& X) {
    const std::vector<double> f = svm_decision(m, X);
    std::vector<int> labels(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) labels[i] = f[i] >= 0.0 ? 1 : 0;
    return labels;
}

}  // namespace faultforge::classifiers
