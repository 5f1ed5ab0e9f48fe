#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "faultforge/pipeline.hpp"
#include "faultforge/report.hpp"
#include "test_support.hpp"

using namespace faultforge;
using namespace faultforge::pipeline;

namespace {

// Small, fast configuration over two little projects.
ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.dataset_paths = {test_support::data_file("log4j-1.1.csv"),
                         test_support::data_file("synapse-1.0.csv")};
    cfg.k_folds = 3;
    cfg.seed = 42;
    cfg.selector_cfg.target_count = 5;

    search::ParamSpace rf;
    rf.dims = {
        {"n_estimators", search::Domain::finite({search::Value{5.0}, search::Value{10.0}})},
        {"max_depth", search::Domain::finite({search::Value{3.0}})},
        {"min_samples_split", search::Domain::finite({search::Value{2.0}})},
        {"min_samples_leaf", search::Domain::finite({search::Value{1.0}})},
    };
    cfg.space_override[Model::RF] = rf;

    search::ParamSpace lr;
    lr.dims = {
        {"C", search::Domain::finite({search::Value{1.0}, search::Value{10.0}})},
        {"penalty", search::Domain::finite({search::Value{std::string("l2")}})},
    };
    cfg.space_override[Model::LR] = lr;

    search::ParamSpace svm;
    svm.dims = {
        {"C", search::Domain::finite({search::Value{1.0}})},
        {"kernel", search::Domain::finite({search::Value{std::string("linear")}})},
        {"gamma", search::Domain::finite({search::Value{std::string("scale")}})},
    };
    cfg.space_override[Model::SVM] = svm;

    cfg.ga.population = 4;
    cfg.ga.generations = 2;
    cfg.random_budget = 3;
    return cfg;
}

std::string mask_timing_columns(const std::string& csv) {
    // Blank any column whose header name ends in _s or _seconds.
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> headers;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) headers.push_back(cell);
    std::string out = line + "\n";
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::vector<std::string> cells;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        for (std::size_t i = 0; i < cells.size() && i < headers.size(); ++i) {
            const std::string& h = headers[i];
            if (h.size() > 2 && h.substr(h.size() - 2) == "_s") cells[i] = "T";
            if (h.size() > 8 && h.substr(h.size() - 8) == "_seconds") cells[i] = "T";
        }
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
        out += "\n";
    }
    return out;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("requested matrix sizes: product, single cell, baseline flag") {
    ExperimentConfig cfg = small_config();
    cfg.selectors = {Selector::MI, Selector::CFS};
    cfg.models = {Model::RF};
    cfg.tuners = {Tuner::GA, Tuner::None};
    const Dataset data = load_and_clean(cfg);
    const auto ledger = run_matrix(cfg, data);
    CHECK(ledger.cells.size() == 4);  // 2 selectors x 1 model x 2 tuners

    ExperimentConfig one = small_config();
    one.selectors = {Selector::CFS};
    one.models = {Model::RF};
    one.tuners = {Tuner::None};
    CHECK(run_matrix(one, data).cells.size() == 1);

    one.include_baseline = true;
    const auto with_base = run_matrix(one, data);
    CHECK(with_base.cells.size() == 2);
    CHECK(with_base.find({Selector::None, Model::RF, Tuner::None}) != nullptr);
}

TEST_CASE("run_fold with no selection and no tuner reduces to plain train/test") {
    ExperimentConfig cfg = small_config();
    const Dataset data = load_and_clean(cfg);
    const auto plan = crossval::stratified_folds(
        data.y, cfg.k_folds, rng::derive(cfg.seed, {rng::hash_label("fold-plan")}));
    const CellKey cell{Selector::None, Model::LR, Tuner::None};
    const auto outcome = run_fold(cfg, data, plan, cell, 0);
    CHECK(outcome.retained.size() == data.X.cols());
    CHECK(outcome.chosen.key() == default_point(Model::LR).key());
    CHECK(outcome.tuner_evals == 0);
    CHECK(outcome.tuning_seconds == 0.0);
    CHECK(outcome.metrics.accuracy > 0.3);
    CHECK(outcome.train_accuracy > 0.3);

    // Deterministic re-run.
    const auto again = run_fold(cfg, data, plan, cell, 0);
    CHECK(again.metrics.accuracy == outcome.metrics.accuracy);
    CHECK(again.metrics.precision == outcome.metrics.precision);
    CHECK(again.retained == outcome.retained);
}

TEST_CASE("leakage guard: fit-phase rows stay inside the training partition") {
    ExperimentConfig cfg = small_config();
    cfg.selectors = {Selector::MI};
    cfg.models = {Model::LR};
    cfg.tuners = {Tuner::Random};
    const Dataset data = load_and_clean(cfg);

    AccessRecorder recorder;
    const auto ledger = run_matrix(cfg, data, &recorder);
    REQUIRE(ledger.cells.size() == 1);
    REQUIRE_FALSE(ledger.cells[0].failed);

    for (std::size_t f = 0; f < cfg.k_folds; ++f) {
        auto [train, test] = crossval::fold_split(ledger.plan, f);
        const std::set<std::size_t> train_set(train.begin(), train.end());
        const std::set<std::size_t> test_set(test.begin(), test.end());
        REQUIRE(recorder.fit_rows.count(f));
        CHECK(recorder.fit_rows.at(f) == train_set);  // subset and exact coverage
        CHECK(recorder.predict_rows.at(f) == test_set);
    }
}

TEST_CASE("failed selector marks its cells, other cells continue") {
    ExperimentConfig cfg = small_config();
    cfg.selectors = {Selector::L1, Selector::MI};
    cfg.models = {Model::LR};
    cfg.tuners = {Tuner::None};
    cfg.selector_cfg.l1_strength = 1e-9;  // shrinks everything: empty selection
    const Dataset data = load_and_clean(cfg);
    const auto ledger = run_matrix(cfg, data);
    REQUIRE(ledger.cells.size() == 2);
    const auto* l1 = ledger.find({Selector::L1, Model::LR, Tuner::None});
    const auto* mi = ledger.find({Selector::MI, Model::LR, Tuner::None});
    REQUIRE(l1 != nullptr);
    REQUIRE(mi != nullptr);
    CHECK(l1->failed);
    CHECK(l1->error.find("fold") != std::string::npos);
    CHECK_FALSE(mi->failed);
}

TEST_CASE("adding cells never perturbs existing ones") {
    ExperimentConfig small = small_config();
    small.selectors = {Selector::MI};
    small.models = {Model::RF};
    small.tuners = {Tuner::None};
    const Dataset data = load_and_clean(small);
    const auto a = run_matrix(small, data);

    ExperimentConfig bigger = small;
    bigger.selectors = {Selector::MI, Selector::CFS};
    bigger.models = {Model::RF, Model::LR};
    bigger.tuners = {Tuner::None, Tuner::Random};
    const auto b = run_matrix(bigger, data);

    const auto* cell_a = a.find({Selector::MI, Model::RF, Tuner::None});
    const auto* cell_b = b.find({Selector::MI, Model::RF, Tuner::None});
    REQUIRE(cell_a);
    REQUIRE(cell_b);
    REQUIRE(cell_a->folds.size() == cell_b->folds.size());
    for (std::size_t f = 0; f < cell_a->folds.size(); ++f) {
        CHECK(cell_a->folds[f].metrics.accuracy == cell_b->folds[f].metrics.accuracy);
        CHECK(cell_a->folds[f].metrics.f1 == cell_b->folds[f].metrics.f1);
        CHECK(cell_a->folds[f].retained == cell_b->folds[f].retained);
        CHECK(cell_a->folds[f].chosen.key() == cell_b->folds[f].chosen.key());
    }
}

TEST_CASE("global resample runs and differs from the per-fold default") {
    ExperimentConfig cfg = small_config();
    cfg.selectors = {Selector::MI};
    cfg.models = {Model::LR};
    cfg.tuners = {Tuner::None};
    const Dataset data = load_and_clean(cfg);
    const auto per_fold = run_matrix(cfg, data);
    cfg.global_resample = true;
    const auto global = run_matrix(cfg, data);
    REQUIRE_FALSE(per_fold.cells[0].failed);
    REQUIRE_FALSE(global.cells[0].failed);
    CHECK(global.n_rows > per_fold.n_rows);  // synthetics folded into CV
}

TEST_CASE("reports: tables, figures, ledger lines and byte-identical reruns") {
    ExperimentConfig cfg = small_config();
    cfg.selectors = {Selector::MI, Selector::CFS};
    cfg.models = {Model::RF, Model::LR};
    cfg.tuners = {Tuner::None, Tuner::Random};
    cfg.include_baseline = true;
    const Dataset data = load_and_clean(cfg);
    const auto ledger = run_matrix(cfg, data);
    CHECK(ledger.cells.size() == 8 + 2);

    const std::string dir =
        (std::filesystem::temp_directory_path() / "ff_report_test").string();
    std::filesystem::remove_all(dir);
    const auto files = report::emit_reports(ledger, dir);
    for (const auto& f : files) CHECK(std::filesystem::exists(f));

    // Selector tables: one per non-baseline selector, 4 rows each (2 models x
    // 2 tuners) plus header.
    for (const char* name : {"mi.csv", "cfs.csv"}) {
        const std::string body = slurp(dir + "/tables/" + std::string(name));
        CHECK(std::count(body.begin(), body.end(), '\n') == 5);
    }
    CHECK(std::count_if(files.begin(), files.end(), [](const std::string& f) {
              return f.find(".svg") != std::string::npos;
          }) == 3);

    const std::string jsonl = slurp(dir + "/ledger.json-lines");
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 10);

    // Figures: every bar's pixel height is proportional to its value.
    for (const char* fig :
         {"f1_by_selector.svg", "accuracy_by_tuner.svg", "train_vs_test.svg"}) {
        const std::string svg = slurp(dir + "/figures/" + std::string(fig));
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.rfind("</svg>") != std::string::npos);
        std::regex bar_re(
            "data-value=\"([0-9.]+)\"[^/]*height=\"([0-9.]+)\"");
        auto begin = std::sregex_iterator(svg.begin(), svg.end(), bar_re);
        std::size_t bars = 0;
        for (auto it = begin; it != std::sregex_iterator(); ++it, ++bars) {
            const double value = std::stod((*it)[1]);
            const double height = std::stod((*it)[2]);
            CHECK(std::abs(height - value * 220.0) <= 0.5);
        }
        CHECK(bars >= 2);
    }

    // Byte-identical rerun with timing columns masked.
    const auto ledger2 = run_matrix(cfg, data);
    CHECK(mask_timing_columns(report::folds_csv(ledger)) ==
          mask_timing_columns(report::folds_csv(ledger2)));
    CHECK(mask_timing_columns(report::summary_csv(ledger)) ==
          mask_timing_columns(report::summary_csv(ledger2)));
    CHECK(report::tuned_vs_untuned_csv(ledger) == report::tuned_vs_untuned_csv(ledger2));
    CHECK(mask_timing_columns(report::selector_table_csv(ledger, Selector::MI)) ==
          mask_timing_columns(report::selector_table_csv(ledger2, Selector::MI)));
    CHECK(mask_timing_columns(report::baseline_overfitting_csv(ledger)) ==
          mask_timing_columns(report::baseline_overfitting_csv(ledger2)));
}

TEST_CASE("tuned cells report the chosen point inside the space") {
    ExperimentConfig cfg = small_config();
    cfg.selectors = {Selector::CFS};
    cfg.models = {Model::RF};
    cfg.tuners = {Tuner::GA};
    const Dataset data = load_and_clean(cfg);
    const auto ledger = run_matrix(cfg, data);
    REQUIRE_FALSE(ledger.cells[0].failed);
    for (const auto& fold : ledger.cells[0].folds) {
        CHECK(cfg.space_override.at(Model::RF).contains(fold.chosen));
        CHECK(fold.tuner_evals > 0);
        CHECK(!fold.retained.empty());
    }
}
