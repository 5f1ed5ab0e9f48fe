#include "faultforge/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "faultforge/errors.hpp"
#include "faultforge/kernels.hpp"
#include "faultforge/rng.hpp"

namespace faultforge::resample {

namespace {

// Integer quotas g_i with sum G: floor(G * w_i) plus the largest remainders,
// remainder ties resolved toward the lower index.
std::vector<std::size_t> largest_remainder_quotas(const std::vector<double>& weights,
                                                  std::size_t total) {
    const std::size_t n = weights.size();
    std::vector<std::size_t> quota(n, 0);
    std::vector<std::pair<double, std::size_t>> frac(n);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double share = static_cast<double>(total) * weights[i];
        quota[i] = static_cast<std::size_t>(std::floor(share));
        assigned += quota[i];
        frac[i] = {share - std::floor(share), i};
    }
    std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t r = 0; assigned < total; ++r, ++assigned) quota[frac[r % n].second] += 1;
    return quota;
}

}  // namespace

AdasynResult adasyn(const Matrix& X, const std::vector<int>& y, const AdasynConfig& cfg) {
    if (X.rows() != y.size()) throw Error("adasyn: X/y size mismatch");
    if (cfg.k_neighbors < 1) throw Error("adasyn: k_neighbors must be >= 1");
    if (!(cfg.balance_target > 0.0 && cfg.balance_target <= 1.0))
        throw Error("adasyn: balance_target must be in (0,1]");

    AdasynResult res;
    res.X = X;
    res.y = y;

    const std::size_t pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    const std::size_t neg = y.size() - pos;
    if (pos == 0 || neg == 0) {
        res.single_class_warning = true;
        return res;
    }
    const int minority_label = pos <= neg ? 1 : 0;
    const std::size_t n_min = std::min(pos, neg);
    const std::size_t n_maj = std::max(pos, neg);

    const std::size_t G = static_cast<std::size_t>(
        std::llround(static_cast<double>(n_maj - n_min) * cfg.balance_target));
    if (G == 0) return res;

    std::vector<std::size_t> minority_rows;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] == minority_label) minority_rows.push_back(i);

    rng::Engine eng(rng::derive(cfg.seed, {rng::hash_label("adasyn")}));

    const std::size_t new_rows = X.rows() + G;
    Matrix out(new_rows, X.cols());
    std::copy(X.data().begin(), X.data().end(), out.data().begin());
    res.y.reserve(new_rows);

    if (n_min == 1) {
        // Nothing to interpolate with; duplicate the lone minority point.
        const std::size_t src = minority_rows.front();
        for (std::size_t g = 0; g < G; ++g) {
            std::copy(X.row(src).begin(), X.row(src).end(), out.row(X.rows() + g).begin());
            res.y.push_back(minority_label);
        }
        res.X = std::move(out);
        res.synthetic_count = G;
        return res;
    }

    const Matrix minority = X.gather_rows(minority_rows);
    const Matrix d_all = kernels::pairwise_sq_dists(minority, X);
    const Matrix d_min = kernels::pairwise_sq_dists(minority, minority);

    const std::size_t k_full = std::min<std::size_t>(cfg.k_neighbors, X.rows() - 1);
    const std::size_t k_min = std::min<std::size_t>(cfg.k_neighbors, n_min - 1);

    // Density weights: share of majority points among each minority point's
    // k nearest neighbors over the whole set.
    std::vector<double> weights(n_min, 0.0);
    double weight_sum = 0.0;
    for (std::size_t m = 0; m < n_min; ++m) {
        std::vector<double> drow(d_all.row(m).begin(), d_all.row(m).end());
        const auto nn = kernels::k_smallest(drow, k_full, minority_rows[m]);
        std::size_t majority_hits = 0;
        for (std::size_t j : nn)
            if (y[j] != minority_label) ++majority_hits;
        weights[m] = static_cast<double>(majority_hits) / static_cast<double>(k_full);
        weight_sum += weights[m];
    }
    if (weight_sum == 0.0) {
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(n_min));
    } else {
        for (double& w : weights) w /= weight_sum;
    }

    const std::vector<std::size_t> quotas = largest_remainder_quotas(weights, G);

    std::size_t write = X.rows();
    for (std::size_t m = 0; m < n_min; ++m) {
        if (quotas[m] == 0) continue;
        std::vector<double> drow(d_min.row(m).begin(), d_min.row(m).end());
        const auto nn = kernels::k_smallest(drow, k_min, m);
        for (std::size_t g = 0; g < quotas[m]; ++g, ++write) {
            const std::size_t z = nn[eng.below(nn.size())];
            const double lambda = eng.uniform();
            for (std::size_t d = 0; d < X.cols(); ++d)
                out.at(write, d) =
                    minority.at(m, d) + lambda * (minority.at(z, d) - minority.at(m, d));
            res.y.push_back(minority_label);
        }
    }

    res.X = std::move(out);
    res.synthetic_count = G;
    return res;
}

}  // namespace faultforge::resample
