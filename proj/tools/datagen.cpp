#include "datagen.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "faultforge/corpus.hpp"
#include "faultforge/rng.hpp"

namespace faultforge::datagen {

const std::vector<ProjectSpec>& benchmark_projects() {
    static const std::vector<ProjectSpec> specs = {
        {"ant-1.7", 746, 166},    {"camel-1.0", 340, 13},   {"camel-1.2", 608, 216},
        {"camel-1.4", 872, 145},  {"camel-1.6", 966, 188},  {"jedit-3.2", 276, 90},
        {"jedit-4.0", 306, 75},   {"jedit-4.2", 368, 48},   {"jedit-4.3", 492, 11},
        {"log4j-1.0", 135, 34},   {"log4j-1.1", 110, 37},   {"log4j-1.2", 205, 189},
        {"lucene-2.0", 196, 91},  {"lucene-2.2", 247, 144}, {"synapse-1.0", 158, 21},
        {"synapse-1.2", 257, 145}, {"xalan-2.0", 724, 156}, {"xalan-2.4", 723, 110},
        {"xalan-2.6", 885, 411},
    };
    return specs;
}

namespace {

struct Row {
    double wmc, dit, noc, cbo, rfc, lcom, ca, ce, npm, lcom3, loc, dam, moa, mfa, cam, ic, cbm,
        amc, max_cc, avg_cc;
    double risk = 0.0;
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Row make_row(rng::Engine& eng, double size_shift, double coupling_shift) {
    Row r{};

    // Latent drivers: class size, coupling, response complexity, control-flow
    // complexity. Log-normal tails like real CK exports.
    const double size = std::exp(0.9 * eng.normal() + size_shift);
    const double coup = std::exp(0.7 * eng.normal() + 0.35 * std::log(size) + coupling_shift);
    const double resp = std::exp(0.6 * eng.normal() + 0.3 * std::log(size));
    const double flow = std::exp(0.7 * eng.normal() + 0.25 * std::log(size));

    r.wmc = std::floor(1.0 + 3.2 * size * (0.7 + 0.6 * eng.uniform()));
    r.dit = 1.0 + std::floor(std::min(7.0, -1.4 * std::log(eng.uniform() + 1e-12)));
    r.noc = eng.uniform() < 0.72 ? 0.0 : std::floor(-3.0 * std::log(eng.uniform() + 1e-12));
    r.cbo = std::floor(1.0 + 2.6 * coup * (0.7 + 0.6 * eng.uniform()));
    r.rfc = std::floor(1.3 * r.wmc + 5.0 * resp + 2.0 * coup + 2.0 * eng.uniform());
    r.lcom = std::floor(0.4 * r.wmc * r.wmc * eng.uniform());
    r.ca = std::floor(1.4 * coup * eng.uniform() + 1.8 * eng.uniform());
    r.ce = std::floor(1.0 + 1.5 * coup * (0.5 + eng.uniform()) + 1.2 * resp * eng.uniform());
    r.npm = std::floor(r.wmc * (0.35 + 0.45 * eng.uniform()));
    r.lcom3 = std::clamp(2.0 * std::pow(eng.uniform(), 0.7) * (0.6 + 0.03 * size), 0.0, 2.0);
    r.loc = std::floor(12.0 + size * (26.0 + 18.0 * eng.uniform()));
    r.dam = clamp01(std::pow(eng.uniform(), 0.45));
    r.moa = std::floor(-1.8 * std::log(eng.uniform() + 1e-12) * eng.uniform());
    r.mfa = eng.uniform() < 0.35 ? 0.0 : clamp01(std::pow(eng.uniform(), 0.6));
    r.cam = clamp01(0.18 + 0.5 * std::pow(eng.uniform(), 0.8) / (1.0 + 0.1 * size));
    r.ic = std::floor(std::min(5.0, -0.9 * std::log(eng.uniform() + 1e-12)));
    r.cbm = std::floor(r.ic * (1.0 + 2.2 * eng.uniform()));
    r.amc = r.wmc > 0 ? r.loc / r.wmc * (0.75 + 0.5 * eng.uniform()) : 0.0;
    r.max_cc = std::floor(1.0 + 2.6 * flow * (0.6 + 0.8 * eng.uniform()));
    r.avg_cc = 0.6 + r.max_cc * (0.10 + 0.12 * eng.uniform());

    // Fault-risk surface over realized metrics: monotone main effects plus
    // interactions and threshold pockets that axis-aligned splits capture.
    auto u = [](double v) { return std::log1p(std::max(0.0, v)); };
    const double u_wmc = u(r.wmc) / 1.6, u_cbo = u(r.cbo) / 1.5, u_rfc = u(r.rfc) / 1.8;
    const double u_loc = u(r.loc) / 2.0, u_ce = u(r.ce) / 1.3, u_cc = u(r.max_cc) / 1.4;

    // Weak monotone main effects plus many small interaction pockets: the
    // pockets reward deep, well-averaged ensembles and starve single trees.
    r.risk = 0.24 * u_wmc + 0.23 * u_cbo + 0.22 * u_rfc + 0.16 * u_ce + 0.13 * u_loc +
             0.16 * r.lcom3 + 0.30 * (0.55 - r.cam) +
             1.60 * (u_wmc - 1.0) * (u_cc - 1.0) +
             1.15 * (u_loc - 1.1) * (u_ce - 0.9) +
             (r.max_cc >= 11.0 && r.dam < 0.45 ? 1.30 : 0.0) +
             (r.max_cc >= 6.0 && r.max_cc < 11.0 && r.lcom3 > 1.1 ? 1.05 : 0.0) +
             (r.mfa < 0.25 && r.lcom3 > 0.8 ? 1.15 : 0.0) +
             (u_cbo > 1.25 && u_rfc > 1.25 ? 1.05 : 0.0) +
             (u_wmc > 1.35 && r.dam < 0.60 && u_cc > 1.0 ? 1.00 : 0.0) +
             (r.dam < 0.30 ? 0.75 : 0.0) +
             (r.cam < 0.25 && u_loc > 1.30 ? 0.95 : 0.0) +
             (u_rfc > 1.45 && r.lcom3 > 0.9 ? 0.95 : 0.0) +
             (r.mfa > 0.85 && u_cbo > 1.1 ? -0.85 : 0.0) +
             (u_wmc > 0.9 && u_wmc < 1.3 && r.mfa < 0.6 && r.dam < 0.7 ? 0.80 : 0.0) +
             (u_cbo > 0.8 && u_cbo < 1.2 && r.lcom3 > 1.3 ? 0.80 : 0.0) +
             (u_rfc > 1.0 && u_rfc < 1.4 && r.cam < 0.35 ? 0.80 : 0.0) +
             (u_ce > 1.05 && r.mfa < 0.5 && r.mfa > 0.1 ? 0.75 : 0.0) +
             (u_loc > 1.45 && u_cc > 1.25 ? 0.85 : 0.0) +
             (r.cam > 0.45 && u_wmc > 1.1 && r.dam < 0.5 ? 0.70 : 0.0) +
             (u_cc > 1.3 && r.lcom3 < 0.5 ? -0.75 : 0.0) +
             (u_cbo > 1.4 && r.dam > 0.75 ? -0.80 : 0.0);
    return r;
}

void row_to_matrix(const Row& r, Matrix& X, std::size_t i) {
    const double vals[20] = {r.wmc, r.dit, r.noc, r.cbo,  r.rfc, r.lcom, r.ca,
                             r.ce,  r.npm, r.lcom3, r.loc, r.dam, r.moa,  r.mfa,
                             r.cam, r.ic,  r.cbm, r.amc,  r.max_cc, r.avg_cc};
    for (std::size_t j = 0; j < 20; ++j) X.at(i, j) = vals[j];
}

double round_to(double v, int digits) {
    const double scale = std::pow(10.0, digits);
    return std::round(v * scale) / scale;
}

}  // namespace

Dataset generate_project(const ProjectSpec& spec, std::uint64_t seed) {
    rng::Engine eng(rng::derive(seed, {rng::hash_label("project"), rng::hash_label(spec.name)}));

    // Per-project shifts; high-defect projects skew larger and more coupled.
    const double rate =
        static_cast<double>(spec.defects) / static_cast<double>(std::max<std::size_t>(spec.rows, 1));
    const double size_shift = 1.05 + 0.55 * rate + 0.25 * (eng.uniform() - 0.5);
    const double coupling_shift = 0.45 + 0.75 * rate + 0.25 * (eng.uniform() - 0.5);

    std::vector<Row> rows;
    rows.reserve(spec.rows);
    for (std::size_t i = 0; i < spec.rows; ++i) rows.push_back(make_row(eng, size_shift, coupling_shift));

    // Labels: the spec.defects highest noisy risks within the project. The
    // noise scale sets how much of the risk surface models can recover.
    const double noise = 1.00;
    std::vector<std::pair<double, std::size_t>> ranked(spec.rows);
    for (std::size_t i = 0; i < spec.rows; ++i) {
        const double g = -std::log(-std::log(std::min(1.0 - 1e-12, eng.uniform() + 1e-12)));
        ranked[i] = {rows[i].risk + noise * g, i};
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<int> labels(spec.rows, 0);
    for (std::size_t k = 0; k < spec.defects && k < spec.rows; ++k) labels[ranked[k].second] = 1;

    Dataset d;
    d.schema = FeatureSchema::ck_default();
    d.X = Matrix(spec.rows, 20);
    d.y = labels;
    d.tags.resize(spec.rows);

    const auto dash = spec.name.find_last_of('-');
    const std::string version = dash == std::string::npos ? "" : spec.name.substr(dash + 1);
    for (std::size_t i = 0; i < spec.rows; ++i) {
        row_to_matrix(rows[i], d.X, i);
        // Trim float noise so values survive a CSV round trip unchanged.
        for (std::size_t j : {9ul, 11ul, 13ul, 14ul, 17ul, 19ul})
            d.X.at(i, j) = round_to(d.X.at(i, j), 4);
        d.tags[i].project = spec.name;
        d.tags[i].version = version;
        d.tags[i].class_name = "class" + std::to_string(i);
    }

    // Sparse missing cells in a few hard-to-collect metrics.
    const std::size_t missing_cols[4] = {9, 11, 14, 19};  // lcom3, dam, cam, avg_cc
    for (std::size_t i = 0; i < spec.rows; ++i)
        for (std::size_t j : missing_cols)
            if (eng.uniform() < 0.012) d.X.at(i, j) = Matrix::missing();

    // Exact duplicates, as real exports contain: replace ~0.5% of rows with a
    // full copy (metrics, missing pattern and label) of an earlier row that
    // carries the same label, keeping the defect count intact.
    std::vector<std::vector<std::size_t>> by_label(2);
    for (std::size_t i = 0; i < spec.rows; ++i) {
        if (i >= 10 && eng.uniform() < 0.005) {
            const auto& pool = by_label[static_cast<std::size_t>(d.y[i])];
            if (!pool.empty()) {
                const std::size_t src = pool[eng.below(pool.size())];
                for (std::size_t j = 0; j < 20; ++j) d.X.at(i, j) = d.X.at(src, j);
            }
        }
        by_label[static_cast<std::size_t>(d.y[i])].push_back(i);
    }
    return d;
}

std::vector<std::string> write_benchmark(const std::string& dir, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    for (const auto& spec : benchmark_projects()) {
        Dataset d = generate_project(spec, seed);
        const std::string path = (std::filesystem::path(dir) / (spec.name + ".csv")).string();
        corpus::save_csv(d, path);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace faultforge::datagen
