#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "faultforge/crossval.hpp"
#include "faultforge/dataset.hpp"
#include "faultforge/evaluation.hpp"
#include "faultforge/feature_selection.hpp"
#include "faultforge/resample.hpp"
#include "faultforge/search.hpp"

namespace faultforge::pipeline {

enum class Model { RF, LR, SVM };
enum class Selector { None, RFE, L1, MI, CFS };
enum class Tuner { None, Grid, Random, GA };

std::string to_string(Model m);
std::string to_string(Selector s);
std::string to_string(Tuner t);
Model model_from_string(const std::string& s);
Selector selector_from_string(const std::string& s);
Tuner tuner_from_string(const std::string& s);

struct CellKey {
    Selector selector = Selector::None;
    Model model = Model::RF;
    Tuner tuner = Tuner::None;

    std::string str() const;
    auto operator<=>(const CellKey&) const = default;
};

struct ExperimentConfig {
    std::vector<std::string> dataset_paths;
    bool pool = true;
    FeatureSchema schema = FeatureSchema::ck_default();
    std::size_t k_folds = 10;
    std::uint64_t seed = 42;
    std::size_t imputer_k = 5;
    feature_selection::SelectorConfig selector_cfg;
    resample::AdasynConfig adasyn;  // seed field ignored; sub-seeds are derived
    bool global_resample = false;   // leaky ablation: resample once before CV
    search::GaConfig ga;            // seed field ignored; sub-seeds are derived
    std::size_t random_budget = 30;
    std::map<Model, search::ParamSpace> space_override;
    std::size_t jobs = 0;  // 0 = all hardware threads
    std::string out_dir = "out";

    // Matrix axes; run/matrix iterate selectors x models x tuners.
    std::vector<Selector> selectors{Selector::RFE, Selector::L1, Selector::MI, Selector::CFS};
    std::vector<Model> models{Model::RF, Model::LR, Model::SVM};
    std::vector<Tuner> tuners{Tuner::Grid, Tuner::Random, Tuner::GA};
    // Adds one (none, model, none) cell per model for the untuned baseline tables.
    bool include_baseline = false;
};

// Rows touched through the dataset facade, split by phase; the leakage guard
// asserts fit-phase rows stay inside each fold's training partition.
struct AccessRecorder {
    std::mutex mutex;
    std::map<std::size_t, std::set<std::size_t>> fit_rows;      // fold -> rows
    std::map<std::size_t, std::set<std::size_t>> predict_rows;  // fold -> rows

    void record_fit(std::size_t fold, const std::vector<std::size_t>& rows);
    void record_predict(std::size_t fold, const std::vector<std::size_t>& rows);
};

struct FoldOutcome {
    evaluation::FoldMetrics metrics;
    double train_accuracy = 0.0;  // on the resampled training matrix the model saw
    double tuning_seconds = 0.0;
    std::size_t tuner_evals = 0;
    search::ParamPoint chosen;
    std::vector<std::size_t> retained;  // original feature indices
};

struct CellResult {
    CellKey key;
    bool failed = false;
    std::string error;
    std::vector<FoldOutcome> folds;
    evaluation::EvaluationReport report;

    double mean_train_accuracy() const;
    double tuning_seconds_total() const;
};

struct RunLedger {
    std::vector<CellResult> cells;  // canonical (selector, model, tuner) order
    crossval::FoldPlan plan;
    std::size_t n_rows = 0;
    std::size_t n_features = 0;

    const CellResult* find(const CellKey& key) const;
};

// Default hyperparameter spaces and the fixed points used when tuner = none.
search::ParamSpace default_space(Model m);
search::ParamPoint default_point(Model m);

// Load every dataset path, pool, and deduplicate. The returned dataset is
// what cross-validation runs on.
Dataset load_and_clean(const ExperimentConfig& cfg);

// Execute one (selector, model, tuner) cell on one fold. Training-partition
// order: fit imputer -> fit scaler -> fit selector -> ADASYN -> tuner with an
// inner 3-fold fitness CV -> final train; the test partition only receives
// apply steps and predict.
FoldOutcome run_fold(const ExperimentConfig& cfg, const Dataset& data,
                     const crossval::FoldPlan& plan, const CellKey& cell, std::size_t fold,
                     AccessRecorder* recorder = nullptr);

// All requested cells across all folds, fold-parallel; failed cells are
// recorded and the run continues.
RunLedger run_matrix(const ExperimentConfig& cfg, const Dataset& data,
                     AccessRecorder* recorder = nullptr);

// Convenience entry: load, clean, run.
RunLedger run_matrix(const ExperimentConfig& cfg, AccessRecorder* recorder = nullptr);

}  // namespace faultforge::pipeline
