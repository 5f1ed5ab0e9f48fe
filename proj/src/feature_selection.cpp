#include "faultforge/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "faultforge/errors.hpp"
#include "faultforge/linear_model.hpp"

namespace faultforge::feature_selection {

namespace {

std::vector<double> column(const Matrix& X, std::size_t j) {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = X.at(i, j);
    return out;
}

double variance(const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

bool is_constant(const std::vector<double>& v) {
    for (double x : v)
        if (x != v.front()) return false;
    return true;
}

}  // namespace

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return sab / std::sqrt(saa * sbb);
}

FeatureSubset select_rfe(const Matrix& X, const std::vector<int>& y, const SelectorConfig& cfg) {
    if (X.cols() < 2) throw Error("select_rfe: need at least 2 features");
    if (cfg.target_count == 0 || cfg.target_count > X.cols())
        throw Error("select_rfe: target_count out of range");

    classifiers::LrParams lr;
    lr.penalty = classifiers::Penalty::L2;
    lr.C = 1.0;

    std::vector<std::size_t> remaining(X.cols());
    std::iota(remaining.begin(), remaining.end(), 0);

    classifiers::LinearModel fit;
    while (true) {
        const Matrix view = X.gather_cols(remaining);
        fit = classifiers::train_lr(view, y, lr);
        if (remaining.size() <= cfg.target_count) break;

        // Smallest |coefficient| goes; exact ties evict the higher index.
        std::size_t drop = 0;
        for (std::size_t j = 1; j < remaining.size(); ++j) {
            const double cand = std::abs(fit.beta[j]);
            const double cur = std::abs(fit.beta[drop]);
            if (cand < cur || (cand == cur && remaining[j] > remaining[drop])) drop = j;
        }
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(drop));
    }

    FeatureSubset out;
    out.method = Method::RFE;
    out.indices = remaining;
    out.scores.resize(remaining.size());
    for (std::size_t j = 0; j < remaining.size(); ++j) out.scores[j] = std::abs(fit.beta[j]);
    return out;
}

FeatureSubset select_l1(const Matrix& X, const std::vector<int>& y, const SelectorConfig& cfg) {
    classifiers::LrParams lr;
    lr.penalty = classifiers::Penalty::L1;
    lr.C = cfg.l1_strength;

    const classifiers::LinearModel fit = classifiers::train_lr(X, y, lr);

    FeatureSubset out;
    out.method = Method::L1;
    for (std::size_t j = 0; j < X.cols(); ++j) {
        if (std::abs(fit.beta[j]) > 1e-8) {
            out.indices.push_back(j);
            out.scores.push_back(fit.beta[j]);
        }
    }
    if (out.indices.empty())
        throw EmptySelectionError("L1 selection kept no features; increase l1_strength (C)");
    return out;
}

std::vector<std::size_t> equal_frequency_bins(const std::vector<double>& x, std::size_t bins,
                                              std::size_t& out_bin_count) {
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());

    // Candidate edges at the quantile positions; duplicates collapse so that
    // equal values always share a bin (bin id = count of edges <= x, a purely
    // rank-based rule, hence invariant under strictly monotone transforms).
    std::vector<double> edges;
    for (std::size_t b = 1; b < bins; ++b) {
        const double e = sorted[b * sorted.size() / bins];
        if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
    std::vector<std::size_t> code(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        code[i] = static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), x[i]) - edges.begin());
    }
    out_bin_count = edges.size() + 1;
    return code;
}

double mutual_information_binned(const std::vector<double>& x, const std::vector<int>& y,
                                 std::size_t bins) {
    const std::size_t n = x.size();
    std::size_t bin_count = 0;
    const std::vector<std::size_t> code = equal_frequency_bins(x, bins, bin_count);

    std::vector<std::size_t> joint(bin_count * 2, 0);
    std::vector<std::size_t> marg_b(bin_count, 0);
    std::size_t marg_c1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        joint[code[i] * 2 + static_cast<std::size_t>(y[i])] += 1;
        marg_b[code[i]] += 1;
        marg_c1 += static_cast<std::size_t>(y[i]);
    }
    const std::size_t marg_c[2] = {n - marg_c1, marg_c1};

    double mi = 0.0;
    for (std::size_t b = 0; b < bin_count; ++b) {
        for (int c = 0; c < 2; ++c) {
            const std::size_t cnt = joint[b * 2 + static_cast<std::size_t>(c)];
            if (cnt == 0) continue;
            const double ratio = (static_cast<double>(cnt) * static_cast<double>(n)) /
                                 (static_cast<double>(marg_b[b]) *
                                  static_cast<double>(marg_c[static_cast<std::size_t>(c)]));
            mi += (static_cast<double>(cnt) / static_cast<double>(n)) * std::log(ratio);
        }
    }
    return mi;
}

FeatureSubset select_mi(const Matrix& X, const std::vector<int>& y, const SelectorConfig& cfg) {
    if (cfg.target_count == 0 || cfg.target_count > X.cols())
        throw Error("select_mi: target_count out of range");
    const std::size_t bins = std::min<std::size_t>(
        cfg.mi_bins, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(X.rows())))));

    std::vector<double> mi(X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j)
        mi[j] = mutual_information_binned(column(X, j), y, std::max<std::size_t>(bins, 1));

    std::vector<std::size_t> order(X.cols());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (mi[a] != mi[b]) return mi[a] > mi[b];
        return a < b;
    });
    order.resize(cfg.target_count);
    std::sort(order.begin(), order.end());

    FeatureSubset out;
    out.method = Method::MI;
    out.indices = order;
    out.scores.reserve(order.size());
    for (std::size_t j : order) out.scores.push_back(mi[j]);
    return out;
}

double cfs_merit(const Matrix& X, const std::vector<int>& y,
                 const std::vector<std::size_t>& subset) {
    if (subset.empty()) return 0.0;
    std::vector<double> yd(y.begin(), y.end());
    const double k = static_cast<double>(subset.size());

    double rcf = 0.0;
    for (std::size_t j : subset) rcf += std::abs(pearson(column(X, j), yd));
    rcf /= k;

    double rff = 0.0;
    if (subset.size() > 1) {
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < subset.size(); ++a)
            for (std::size_t b = a + 1; b < subset.size(); ++b) {
                rff += std::abs(pearson(column(X, subset[a]), column(X, subset[b])));
                ++pairs;
            }
        rff /= static_cast<double>(pairs);
    }
    return (k * rcf) / std::sqrt(k + k * (k - 1.0) * rff);
}

FeatureSubset select_cfs(const Matrix& X, const std::vector<int>& y, const SelectorConfig& cfg) {
    if (X.rows() < 3) throw Error("select_cfs: need at least 3 rows");

    FeatureSubset out;
    out.method = Method::CFS;

    std::vector<double> yd(y.begin(), y.end());
    if (variance(yd) <= 0.0) throw Error("select_cfs: labels are single-class");

    // Zero-variance features cannot carry correlation; exclude with a flag.
    std::vector<std::size_t> candidates;
    std::vector<std::vector<double>> cols(X.cols());
    std::vector<double> rcf(X.cols(), 0.0);
    for (std::size_t j = 0; j < X.cols(); ++j) {
        cols[j] = column(X, j);
        if (is_constant(cols[j])) {
            out.constant_feature_warning = true;
            continue;
        }
        rcf[j] = std::abs(pearson(cols[j], yd));
        candidates.push_back(j);
    }
    if (candidates.empty()) throw EmptySelectionError("CFS found no usable features");

    // Pairwise |r| between features, computed on demand.
    std::map<std::pair<std::size_t, std::size_t>, double> rff_cache;
    auto rff = [&](std::size_t a, std::size_t b) {
        const auto key = std::minmax(a, b);
        auto it = rff_cache.find(key);
        if (it == rff_cache.end())
            it = rff_cache.emplace(key, std::abs(pearson(cols[a], cols[b]))).first;
        return it->second;
    };

    std::vector<std::size_t> chosen;
    double sum_rcf = 0.0;
    double sum_rff = 0.0;
    auto merit_with = [&](std::size_t extra) {
        const double k = static_cast<double>(chosen.size() + 1);
        const double a_cf = (sum_rcf + rcf[extra]) / k;
        double extra_ff = 0.0;
        for (std::size_t c : chosen) extra_ff += rff(c, extra);
        const double pairs = k * (k - 1.0) / 2.0;
        const double a_ff = pairs > 0.0 ? (sum_rff + extra_ff) / pairs : 0.0;
        return (k * a_cf) / std::sqrt(k + k * (k - 1.0) * a_ff);
    };

    std::vector<bool> used(X.cols(), false);
    double best_prefix_merit = -1.0;
    std::size_t best_prefix_len = 0;
    std::size_t stale = 0;

    while (chosen.size() < candidates.size() && stale < cfg.cfs_patience) {
        std::size_t pick = X.cols();
        double pick_merit = -1.0;
        for (std::size_t j : candidates) {
            if (used[j]) continue;
            const double m = merit_with(j);
            if (m > pick_merit) {
                pick_merit = m;
                pick = j;
            }
        }
        if (pick == X.cols()) break;

        for (std::size_t c : chosen) sum_rff += rff(c, pick);
        sum_rcf += rcf[pick];
        chosen.push_back(pick);
        used[pick] = true;

        if (pick_merit > best_prefix_merit) {
            best_prefix_merit = pick_merit;
            best_prefix_len = chosen.size();
            stale = 0;
        } else {
            ++stale;
        }
    }

    chosen.resize(best_prefix_len);
    std::sort(chosen.begin(), chosen.end());
    out.indices = chosen;
    out.scores.reserve(chosen.size());
    for (std::size_t j : chosen) out.scores.push_back(rcf[j]);
    return out;
}

}  // namespace faultforge::feature_selection
