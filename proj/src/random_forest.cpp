#include "faultforge/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "faultforge/errors.hpp"
#include "faultforge/rng.hpp"

namespace faultforge::classifiers {

bool ForestModel::operator==(const ForestModel& o) const {
    if (n_features != o.n_features || trees.size() != o.trees.size()) return false;
    for (std::size_t t = 0; t < trees.size(); ++t) {
        const auto& a = trees[t].nodes;
        const auto& b = o.trees[t].nodes;
        if (a.size() != b.size()) return false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].feature != b[i].feature || a[i].threshold != b[i].threshold ||
                a[i].left != b[i].left || a[i].right != b[i].right ||
                a[i].count0 != b[i].count0 || a[i].count1 != b[i].count1 ||
                a[i].leaf_class != b[i].leaf_class)
                return false;
        }
    }
    return true;
}

namespace {

// Ordinal view of the training matrix: per feature, the sorted unique values
// and a per-row code into them. Split search then runs on integer codes: a
// counting scan when the feature has few distinct values, a two-pass radix
// scan otherwise. Both enumerate thresholds in ascending value order, so they
// find identical splits.
struct OrdinalView {
    std::vector<std::vector<double>> uniq;           // per feature, ascending
    std::vector<std::vector<std::uint16_t>> code;    // per feature, per row
};

OrdinalView build_ordinal(const Matrix& X) {
    OrdinalView v;
    const std::size_t n = X.rows(), p = X.cols();
    v.uniq.resize(p);
    v.code.assign(p, std::vector<std::uint16_t>(n));
    std::vector<std::pair<double, std::uint32_t>> col(n);
    for (std::size_t f = 0; f < p; ++f) {
        for (std::size_t i = 0; i < n; ++i) col[i] = {X.at(i, f), static_cast<std::uint32_t>(i)};
        std::sort(col.begin(), col.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        auto& u = v.uniq[f];
        for (std::size_t i = 0; i < n; ++i) {
            if (u.empty() || col[i].first != u.back()) u.push_back(col[i].first);
            v.code[f][col[i].second] = static_cast<std::uint16_t>(u.size() - 1);
        }
    }
    return v;
}

struct SplitResult {
    bool found = false;
    int feature = -1;
    double score = 0.0;            // weighted Gini to minimize
    std::uint32_t split_code = 0;  // last code routed left
    std::uint32_t next_code = 0;   // first code routed right
    double left_n = 0.0, left1 = 0.0;  // weighted counts routed left
};

constexpr std::size_t kCountingMaxBins = 1024;

struct TreeBuilder {
    const Matrix& X;
    const OrdinalView& ord;
    const RfParams& p;
    rng::Engine eng;

    // Bootstrap as unique rows with integer multiplicities; identical split
    // decisions to materializing the sample, at ~0.63n rows.
    std::vector<std::uint32_t> rows;  // unique sampled rows, partitioned in place
    std::vector<std::uint32_t> lw;    // per original row: (label << 16) | multiplicity

    std::vector<int> feat_scratch;
    std::vector<std::uint32_t> cnt_pos, cnt_neg;     // counting bins
    std::vector<std::uint64_t> radix_a, radix_b;     // packed (code, label, weight)
    std::vector<std::uint32_t> radix_cnt;
    Tree tree;

    TreeBuilder(const Matrix& X, const std::vector<int>& y, const OrdinalView& ord,
                const RfParams& p, std::uint64_t tree_seed)
        : X(X), ord(ord), p(p), eng(tree_seed) {
        const std::size_t n = X.rows();
        lw.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i)
            lw[i] = static_cast<std::uint32_t>(y[i]) << 16;
        for (std::size_t i = 0; i < n; ++i) ++lw[eng.below(n)];
        rows.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            if ((lw[i] & 0xffff) > 0) rows.push_back(static_cast<std::uint32_t>(i));
        cnt_pos.assign(kCountingMaxBins, 0);
        cnt_neg.assign(kCountingMaxBins, 0);
        radix_cnt.assign(256, 0);
    }

    static double pair_score(double n0, double n1) {
        // m * gini == m - (n0^2 + n1^2) / m, summed over children and divided
        // by the parent size gives the weighted Gini.
        const double m = n0 + n1;
        if (m == 0.0) return 0.0;
        return m - (n0 * n0 + n1 * n1) / m;
    }

    // Shared threshold scan: called with per-present-code (pos, neg) counts
    // in ascending code order.
    struct Scan {
        double total, total1, msl;
        double left_n = 0.0, left1 = 0.0;
        bool have_prev = false;
        std::uint32_t prev_code = 0;
        int feature;
        SplitResult* out;
        bool improved = false;

        void group(std::uint32_t code, double pos, double neg) {
            if (have_prev) {
                const double right_n = total - left_n;
                if (left_n >= msl && right_n >= msl) {
                    const double left0 = left_n - left1;
                    const double right1 = total1 - left1;
                    const double right0 = right_n - right1;
                    const double score =
                        (pair_score(left0, left1) + pair_score(right0, right1)) / total;
                    if (!out->found || score < out->score) {
                        out->found = true;
                        out->feature = feature;
                        out->score = score;
                        out->split_code = prev_code;
                        out->next_code = code;
                        out->left_n = left_n;
                        out->left1 = left1;
                        improved = true;
                    }
                }
            }
            left_n += pos + neg;
            left1 += pos;
            have_prev = true;
            prev_code = code;
        }
    };

    void best_split_for_feature(int f, std::size_t lo, std::size_t hi, double total_w,
                                double total1_w, SplitResult& out) {
        const auto& code = ord.code[static_cast<std::size_t>(f)];
        const std::size_t u = ord.uniq[static_cast<std::size_t>(f)].size();
        const std::size_t m = hi - lo;
        Scan scan{total_w, total1_w, static_cast<double>(p.min_samples_leaf), 0.0, 0.0, false, 0,
                  f, &out, false};

        if (u <= kCountingMaxBins && u <= 4 * m) {
            // Counting scan over the distinct-value bins.
            std::memset(cnt_pos.data(), 0, u * sizeof(std::uint32_t));
            std::memset(cnt_neg.data(), 0, u * sizeof(std::uint32_t));
            for (std::size_t r = lo; r < hi; ++r) {
                const std::uint32_t row = rows[r];
                const std::uint32_t c = code[row];
                const std::uint32_t v = lw[row];
                if (v >> 16)
                    cnt_pos[c] += v & 0xffff;
                else
                    cnt_neg[c] += v & 0xffff;
            }
            for (std::size_t c = 0; c < u; ++c) {
                if (cnt_pos[c] == 0 && cnt_neg[c] == 0) continue;
                scan.group(static_cast<std::uint32_t>(c), cnt_pos[c], cnt_neg[c]);
            }
            return;
        }

        // Order the node's rows by code: comparison sort when the node is
        // small, two-pass radix otherwise. Pack (code << 32)|(label << 16)|weight.
        radix_a.resize(m);
        for (std::size_t r = lo; r < hi; ++r) {
            const std::uint32_t row = rows[r];
            radix_a[r - lo] = (static_cast<std::uint64_t>(code[row]) << 32) | lw[row];
        }
        if (m <= 96) {
            std::sort(radix_a.begin(), radix_a.begin() + static_cast<std::ptrdiff_t>(m));
        } else {
            radix_b.resize(m);
            for (int pass = 0; pass < 2; ++pass) {
                const int shift = 32 + 8 * pass;
                std::memset(radix_cnt.data(), 0, 256 * sizeof(std::uint32_t));
                for (std::size_t i = 0; i < m; ++i) ++radix_cnt[(radix_a[i] >> shift) & 0xff];
                std::uint32_t run = 0;
                for (std::size_t b = 0; b < 256; ++b) {
                    const std::uint32_t c = radix_cnt[b];
                    radix_cnt[b] = run;
                    run += c;
                }
                for (std::size_t i = 0; i < m; ++i)
                    radix_b[radix_cnt[(radix_a[i] >> shift) & 0xff]++] = radix_a[i];
                std::swap(radix_a, radix_b);
            }
        }
        std::size_t i = 0;
        while (i < m) {
            const std::uint32_t c = static_cast<std::uint32_t>(radix_a[i] >> 32);
            double pos = 0.0, neg = 0.0;
            while (i < m && static_cast<std::uint32_t>(radix_a[i] >> 32) == c) {
                const double w = static_cast<double>(radix_a[i] & 0xffff);
                if ((radix_a[i] >> 16) & 0xff)
                    pos += w;
                else
                    neg += w;
                ++i;
            }
            scan.group(c, pos, neg);
        }
    }

    struct Frame {
        std::size_t lo, hi, depth;
        int parent;
        bool is_left;
        double w_total, w1;  // weighted size and positive weight of the node
    };

    // Preorder build with an explicit stack; node ids and RNG consumption
    // match a parent/left/right recursion exactly.
    Tree run() {
        tree.nodes.reserve(64);
        double root_w = 0.0, root_w1 = 0.0;
        for (std::uint32_t row : rows) {
            const std::uint32_t v = lw[row];
            root_w += v & 0xffff;
            if (v >> 16) root_w1 += v & 0xffff;
        }
        std::vector<Frame> stack;
        stack.push_back({0, rows.size(), 0, -1, false, root_w, root_w1});
        while (!stack.empty()) {
            const Frame fr = stack.back();
            stack.pop_back();

            const double w_total = fr.w_total;
            const double w1 = fr.w1;
            const double w0 = w_total - w1;

            const bool at_depth = p.max_depth != 0 && fr.depth >= p.max_depth;
            const bool pure = w0 == 0.0 || w1 == 0.0;
            const bool too_small = w_total < static_cast<double>(p.min_samples_split);

            SplitResult best;
            if (!at_depth && !pure && !too_small) {
                const std::size_t p_total = X.cols();
                const std::size_t k_feat =
                    static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p_total))));
                feat_scratch.resize(p_total);
                std::iota(feat_scratch.begin(), feat_scratch.end(), 0);
                for (std::size_t d = 0; d < k_feat; ++d) {
                    const std::size_t pick = d + static_cast<std::size_t>(eng.below(p_total - d));
                    std::swap(feat_scratch[d], feat_scratch[pick]);
                }
                for (std::size_t d = 0; d < k_feat; ++d)
                    best_split_for_feature(feat_scratch[d], fr.lo, fr.hi, w_total, w1, best);
            }

            const int node_id = static_cast<int>(tree.nodes.size());
            tree.nodes.emplace_back();
            if (fr.parent >= 0) {
                TreeNode& par = tree.nodes[static_cast<std::size_t>(fr.parent)];
                (fr.is_left ? par.left : par.right) = node_id;
            }

            if (!best.found) {
                TreeNode& leaf = tree.nodes.back();
                leaf.count0 = static_cast<std::uint32_t>(w0);
                leaf.count1 = static_cast<std::uint32_t>(w1);
                leaf.leaf_class = w1 > w0 ? 1 : 0;  // tie -> 0
                continue;
            }

            const auto& code = ord.code[static_cast<std::size_t>(best.feature)];
            auto mid_it =
                std::partition(rows.begin() + static_cast<std::ptrdiff_t>(fr.lo),
                               rows.begin() + static_cast<std::ptrdiff_t>(fr.hi),
                               [&](std::uint32_t r) { return code[r] <= best.split_code; });
            const std::size_t mid = static_cast<std::size_t>(mid_it - rows.begin());

            const auto& uniq = ord.uniq[static_cast<std::size_t>(best.feature)];
            TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
            node.feature = best.feature;
            // Midpoint between the two node-present values straddling the cut.
            node.threshold = 0.5 * (uniq[best.split_code] + uniq[best.next_code]);

            stack.push_back({mid, fr.hi, fr.depth + 1, node_id, false,
                             w_total - best.left_n, w1 - best.left1});
            stack.push_back({fr.lo, mid, fr.depth + 1, node_id, true, best.left_n, best.left1});
        }
        return std::move(tree);
    }
};

}  // namespace

ForestModel train_rf(const Matrix& X, const std::vector<int>& y, const RfParams& p) {
    if (X.rows() < 2 || X.rows() != y.size()) throw Error("train_rf: bad input shape");
    if (p.n_estimators == 0) throw Error("train_rf: n_estimators must be >= 1");
    if (p.min_samples_leaf > p.min_samples_split)
        throw Error("train_rf: min_samples_leaf must be <= min_samples_split");
    const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
    const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
    if (!has0 || !has1) throw Error("train_rf: both classes must be present");
    if (X.rows() > 0xffff) throw Error("train_rf: row count exceeds the 65535 supported");

    const OrdinalView ord = build_ordinal(X);

    ForestModel model;
    model.n_features = X.cols();
    model.trees.resize(p.n_estimators);
    const std::ptrdiff_t t_count = static_cast<std::ptrdiff_t>(p.n_estimators);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < t_count; ++t) {
        const std::uint64_t tree_seed =
            rng::derive(p.seed, {rng::hash_label("rf-tree"), static_cast<std::uint64_t>(t)});
        TreeBuilder builder(X, y, ord, p, tree_seed);
        model.trees[static_cast<std::size_t>(t)] = builder.run();
    }
    return model;
}

std::vector<std::size_t> rf_votes(const ForestModel& m, const Matrix& X) {
    if (X.cols() != m.n_features) throw Error("predict_rf: column count mismatch");
    std::vector<std::size_t> votes(X.rows(), 0);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(X.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double* row = X.row(static_cast<std::size_t>(i)).data();
        std::size_t ones = 0;
        for (const Tree& t : m.trees) ones += static_cast<std::size_t>(t.predict_one(row));
        votes[static_cast<std::size_t>(i)] = ones;
    }
    return votes;
}

std::vector<int> predict_rf(const ForestModel& m, const Matrix& X) {
    const std::vector<std::size_t> votes = rf_votes(m, X);
    std::vector<int> labels(votes.size());
    for (std::size_t i = 0; i < votes.size(); ++i)
        labels[i] = 2 * votes[i] > m.trees.size() ? 1 : 0;  // exact tie -> 0
    return labels;
}

std::vector<std::vector<int>> predict_rf_prefixes(const ForestModel& m, const Matrix& X,
                                                  const std::vector<std::size_t>& tree_counts) {
    if (X.cols() != m.n_features) throw Error("predict_rf: column count mismatch");
    for (std::size_t t : tree_counts)
        if (t == 0 || t > m.trees.size()) throw Error("predict_rf_prefixes: bad tree count");
    std::vector<std::vector<int>> out(tree_counts.size(), std::vector<int>(X.rows()));
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(X.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double* row = X.row(static_cast<std::size_t>(i)).data();
        std::size_t ones = 0;
        std::size_t next = 0;
        for (std::size_t t = 0; t < m.trees.size() && next < tree_counts.size(); ++t) {
            ones += static_cast<std::size_t>(m.trees[t].predict_one(row));
            while (next < tree_counts.size() && tree_counts[next] == t + 1) {
                out[next][static_cast<std::size_t>(i)] = 2 * ones > tree_counts[next] ? 1 : 0;
                ++next;
            }
        }
    }
    return out;
}

std::vector<int> predict_rf_serial(const ForestModel& m, const Matrix& X) {
    if (X.cols() != m.n_features) throw Error("predict_rf: column count mismatch");
    std::vector<int> labels(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        std::size_t ones = 0;
        for (const Tree& t : m.trees) ones += static_cast<std::size_t>(t.predict_one(X.row(i).data()));
        labels[i] = 2 * ones > m.trees.size() ? 1 : 0;
    }
    return labels;
}

}  // namespace faultforge::classifiers
