#include "cli.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "faultforge/corpus.hpp"
#include "faultforge/pipeline.hpp"
#include "faultforge/report.hpp"

namespace faultforge::cli {

namespace {

using pipeline::ExperimentConfig;
using pipeline::Model;
using pipeline::Selector;
using pipeline::Tuner;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

FeatureSchema schema_from_flag(const std::string& names_csv) {
    if (names_csv.empty()) return FeatureSchema::ck_default();
    FeatureSchema schema{split_list(names_csv)};
    schema.validate();
    return schema;
}

// "<model>.<dim>=v1,v2,..." or "<model>.<dim>=loguniform:lo:hi"
void apply_space_override(ExperimentConfig& cfg, const std::string& text) {
    const auto dot = text.find('.');
    const auto eq = text.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq)
        throw Error("bad --space override '" + text + "' (expected model.dim=values)");
    const Model model = pipeline::model_from_string(text.substr(0, dot));
    const std::string dim = text.substr(dot + 1, eq - dot - 1);
    const std::string spec = text.substr(eq + 1);

    search::Domain domain;
    if (spec.rfind("loguniform:", 0) == 0) {
        const auto parts = split_list(spec.substr(11));
        double lo = 0.0, hi = 0.0;
        std::string rest = spec.substr(11);
        const auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw Error("bad interval in --space override '" + text + "'");
        lo = std::stod(rest.substr(0, colon));
        hi = std::stod(rest.substr(colon + 1));
        (void)parts;
        domain = search::Domain::log_uniform(lo, hi);
    } else {
        std::vector<search::Value> values;
        for (const std::string& tok : split_list(spec)) {
            double num = 0.0;
            const char* begin = tok.data();
            const char* end = begin + tok.size();
            const auto [p, ec] = std::from_chars(begin, end, num);
            if (ec == std::errc{} && p == end)
                values.emplace_back(num);
            else
                values.emplace_back(tok);
        }
        if (values.empty()) throw Error("empty value list in --space override '" + text + "'");
        domain = search::Domain::finite(std::move(values));
    }

    auto it = cfg.space_override.find(model);
    if (it == cfg.space_override.end())
        it = cfg.space_override.emplace(model, pipeline::default_space(model)).first;
    for (auto& [name, dom] : it->second.dims) {
        if (name == dim) {
            dom = domain;
            return;
        }
    }
    throw Error("unknown dim '" + dim + "' for model '" + text.substr(0, dot) + "'");
}

struct CommonFlags {
    std::vector<std::string> datasets;
    bool pool = true;
    std::string schema_csv;
    std::size_t folds = 10;
    std::uint64_t seed = 42;
    std::size_t jobs = 0;
    std::string out_dir;
    std::size_t fs_k = 10;
    double fs_c = 1.0;
    std::size_t fs_bins = 10;
    std::size_t cfs_patience = 5;
    std::size_t imputer_k = 5;
    std::size_t adasyn_k = 5;
    double balance_target = 1.0;
    bool global_resample = false;
    std::size_t tuner_budget = 30;
    std::size_t ga_pop = 20;
    std::size_t ga_gens = 15;
    std::vector<std::string> space_overrides;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--dataset", f.datasets, "Dataset CSV file(s)")->required()->expected(-1);
    cmd->add_flag("--pool,!--no-pool", f.pool, "Pool all dataset files into one corpus")
        ->capture_default_str();
    cmd->add_option("--schema", f.schema_csv, "Comma-separated feature names overriding the default")
        ->capture_default_str();
    cmd->add_option("--folds", f.folds, "Cross-validation folds")->capture_default_str();
    cmd->add_option("--seed", f.seed, "Master seed; all randomness derives from it")
        ->capture_default_str();
    cmd->add_option("--jobs", f.jobs, "Worker cap (0 = all hardware threads)")
        ->capture_default_str();
    cmd->add_option("--out", f.out_dir, "Report output directory")
        ->envname("FAULTFORGE_OUT")
        ->capture_default_str();
    cmd->add_option("--fs-k", f.fs_k, "Features kept by RFE and MI")->capture_default_str();
    cmd->add_option("--fs-c", f.fs_c, "L1 selection strength C")->capture_default_str();
    cmd->add_option("--fs-bins", f.fs_bins, "MI bins")->capture_default_str();
    cmd->add_option("--cfs-patience", f.cfs_patience, "CFS non-improving expansions allowed")
        ->capture_default_str();
    cmd->add_option("--imputer-k", f.imputer_k, "Imputation neighbors")->capture_default_str();
    cmd->add_option("--adasyn-k", f.adasyn_k, "Resampling neighbors")->capture_default_str();
    cmd->add_option("--balance-target", f.balance_target,
                    "Fraction of the class gap closed by resampling")
        ->capture_default_str();
    cmd->add_flag("--global-resample", f.global_resample,
                  "Resample once before cross-validation (leaky ablation)")
        ->capture_default_str();
    cmd->add_option("--tuner-budget", f.tuner_budget, "Random search samples")
        ->capture_default_str();
    cmd->add_option("--ga-pop", f.ga_pop, "GA population")->capture_default_str();
    cmd->add_option("--ga-gens", f.ga_gens, "GA generations")->capture_default_str();
    cmd->add_option("--space", f.space_overrides,
                    "Space override model.dim=v1,v2 or model.dim=loguniform:lo:hi")
        ->capture_default_str();
}

ExperimentConfig config_from_flags(const CommonFlags& f) {
    ExperimentConfig cfg;
    cfg.dataset_paths = f.datasets;
    cfg.pool = f.pool;
    cfg.schema = schema_from_flag(f.schema_csv);
    cfg.k_folds = f.folds;
    cfg.seed = f.seed;
    cfg.jobs = f.jobs;
    cfg.out_dir = f.out_dir.empty() ? "out" : f.out_dir;
    cfg.selector_cfg.target_count = f.fs_k;
    cfg.selector_cfg.l1_strength = f.fs_c;
    cfg.selector_cfg.mi_bins = f.fs_bins;
    cfg.selector_cfg.cfs_patience = f.cfs_patience;
    cfg.imputer_k = f.imputer_k;
    cfg.adasyn.k_neighbors = f.adasyn_k;
    cfg.adasyn.balance_target = f.balance_target;
    cfg.global_resample = f.global_resample;
    cfg.random_budget = f.tuner_budget;
    cfg.ga.population = f.ga_pop;
    cfg.ga.generations = f.ga_gens;
    for (const std::string& s : f.space_overrides) apply_space_override(cfg, s);
    return cfg;
}

void print_cell_line(std::ostream& out, const pipeline::CellResult& cell) {
    char buf[256];
    if (cell.failed) {
        out << cell.key.str() << " failed: " << cell.error << "\n";
        return;
    }
    std::snprintf(buf, sizeof(buf),
                  "%s accuracy %.4f (std %.4f) precision %.4f recall %.4f f1 %.4f",
                  cell.key.str().c_str(), cell.report.accuracy.mean, cell.report.accuracy.stddev,
                  cell.report.precision.mean, cell.report.recall.mean, cell.report.f1.mean);
    out << buf << "\n";
}

// Runs the requested cells over every project file separately.
int run_per_project(const ExperimentConfig& base, std::ostream& out) {
    for (const std::string& path : base.dataset_paths) {
        ExperimentConfig cfg = base;
        cfg.dataset_paths = {path};
        const std::string stem = std::filesystem::path(path).stem().string();
        cfg.out_dir = (std::filesystem::path(base.out_dir) / stem).string();
        out << "== " << stem << "\n";
        const auto ledger = pipeline::run_matrix(cfg);
        for (const auto& cell : ledger.cells) print_cell_line(out, cell);
        report::emit_reports(ledger, cfg.out_dir);
    }
    return 0;
}

int cmd_inspect(const std::vector<std::string>& paths, const std::string& schema_csv,
                const std::string& csv_out, std::ostream& out) {
    const FeatureSchema schema = schema_from_flag(schema_csv);
    std::vector<Dataset> parts;
    for (const auto& path : paths) parts.push_back(corpus::load_csv(path, schema));
    const Dataset pooled = parts.size() == 1 ? parts.front() : corpus::pool(parts);
    const auto summaries = corpus::summarize(pooled);

    std::string csv = "project,instances,defective,rate\n";
    char buf[160];
    for (const auto& s : summaries) {
        std::snprintf(buf, sizeof(buf), "%s %zu %zu %.3f", s.project.c_str(), s.instances,
                      s.defective, s.rate);
        out << buf << "\n";
        std::snprintf(buf, sizeof(buf), "%s,%zu,%zu,%.3f", s.project.c_str(), s.instances,
                      s.defective, s.rate);
        csv += std::string(buf) + "\n";
    }
    if (!csv_out.empty()) {
        std::ofstream f(csv_out, std::ios::binary);
        if (!f) throw Error("cannot write " + csv_out);
        f << csv;
    }
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Software fault prediction workbench: feature selection, "
                 "from-scratch classifiers and hyperparameter search over "
                 "PROMISE-style CK-metric datasets"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read option defaults from a key=value file");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Summarize dataset files (Table-I style)");
    std::vector<std::string> inspect_paths;
    std::string inspect_schema, inspect_csv;
    inspect->add_option("paths", inspect_paths, "Dataset CSV files")->required()->expected(-1);
    inspect->add_option("--schema", inspect_schema, "Comma-separated feature names")
        ->capture_default_str();
    inspect->add_option("--csv", inspect_csv, "Also write the summary as CSV")
        ->capture_default_str();

    // run
    auto* run = app.add_subcommand("run", "Run one selector/model/tuner cell");
    CommonFlags run_flags;
    std::string run_model = "rf", run_fs = "none", run_tuner = "none";
    run->add_option("--model", run_model, "Classifier: rf, lr or svm")->capture_default_str();
    run->add_option("--fs", run_fs, "Feature selector: none, rfe, l1, mi or cfs")
        ->capture_default_str();
    run->add_option("--tuner", run_tuner, "Tuner: none, grid, random or ga")
        ->capture_default_str();
    add_common_flags(run, run_flags);

    // matrix
    auto* matrix = app.add_subcommand("matrix", "Run the full selector x model x tuner matrix");
    CommonFlags matrix_flags;
    std::string matrix_selectors = "rfe,l1,mi,cfs";
    std::string matrix_models = "rf,lr,svm";
    std::string matrix_tuners = "grid,random,ga";
    bool matrix_baseline = false;
    matrix->add_option("--selectors", matrix_selectors, "Selectors to include")
        ->capture_default_str();
    matrix->add_option("--models", matrix_models, "Models to include")->capture_default_str();
    matrix->add_option("--tuners", matrix_tuners, "Tuners to include")->capture_default_str();
    matrix->add_flag("--baseline", matrix_baseline,
                     "Also run the untuned no-selection baseline cells")
        ->capture_default_str();
    add_common_flags(matrix, matrix_flags);

    std::vector<const char*> argv;
    argv.push_back("faultforge");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (inspect->parsed()) {
            try {
                return cmd_inspect(inspect_paths, inspect_schema, inspect_csv, out);
            } catch (const ParseError& e) {
                err << "error: " << e.what() << "\n";
                return 2;
            } catch (const SchemaError& e) {
                err << "error: " << e.what() << "\n";
                return 2;
            }
        }
        if (run->parsed()) {
            ExperimentConfig cfg = config_from_flags(run_flags);
            cfg.selectors = {pipeline::selector_from_string(run_fs)};
            cfg.models = {pipeline::model_from_string(run_model)};
            cfg.tuners = {pipeline::tuner_from_string(run_tuner)};
            if (!cfg.pool && cfg.dataset_paths.size() > 1) return run_per_project(cfg, out);
            const auto ledger = pipeline::run_matrix(cfg);
            for (const auto& cell : ledger.cells) print_cell_line(out, cell);
            report::emit_reports(ledger, cfg.out_dir);
            if (ledger.cells.front().failed) {
                err << "error: " << ledger.cells.front().error << "\n";
                return 1;
            }
            return 0;
        }
        // matrix
        ExperimentConfig cfg = config_from_flags(matrix_flags);
        cfg.selectors.clear();
        for (const auto& s : split_list(matrix_selectors))
            cfg.selectors.push_back(pipeline::selector_from_string(s));
        cfg.models.clear();
        for (const auto& s : split_list(matrix_models))
            cfg.models.push_back(pipeline::model_from_string(s));
        cfg.tuners.clear();
        for (const auto& s : split_list(matrix_tuners))
            cfg.tuners.push_back(pipeline::tuner_from_string(s));
        cfg.include_baseline = matrix_baseline;
        if (!cfg.pool && cfg.dataset_paths.size() > 1) return run_per_project(cfg, out);
        const auto ledger = pipeline::run_matrix(cfg);
        for (const auto& cell : ledger.cells) print_cell_line(out, cell);
        report::emit_reports(ledger, cfg.out_dir);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace faultforge::cli
