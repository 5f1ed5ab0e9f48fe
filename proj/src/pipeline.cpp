#include "faultforge/pipeline.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <unordered_map>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "faultforge/corpus.hpp"
#include "faultforge/linear_model.hpp"
#include "faultforge/preprocess.hpp"
#include "faultforge/random_forest.hpp"
#include "faultforge/rng.hpp"
#include "faultforge/svm.hpp"

namespace faultforge::pipeline {

namespace {
using classifiers::ForestModel;
using classifiers::LinearModel;
using classifiers::SvmModel;
using search::Fitness;
using search::ParamPoint;
using search::ParamSpace;
using search::Value;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

std::string to_string(Model m) {
    switch (m) {
        case Model::RF: return "rf";
        case Model::LR: return "lr";
        case Model::SVM: return "svm";
    }
    return "?";
}

std::string to_string(Selector s) {
    switch (s) {
        case Selector::None: return "none";
        case Selector::RFE: return "rfe";
        case Selector::L1: return "l1";
        case Selector::MI: return "mi";
        case Selector::CFS: return "cfs";
    }
    return "?";
}

std::string to_string(Tuner t) {
    switch (t) {
        case Tuner::None: return "none";
        case Tuner::Grid: return "grid";
        case Tuner::Random: return "random";
        case Tuner::GA: return "ga";
    }
    return "?";
}

Model model_from_string(const std::string& s) {
    if (s == "rf") return Model::RF;
    if (s == "lr") return Model::LR;
    if (s == "svm") return Model::SVM;
    throw Error("unknown model '" + s + "' (expected rf, lr or svm)");
}

Selector selector_from_string(const std::string& s) {
    if (s == "none") return Selector::None;
    if (s == "rfe") return Selector::RFE;
    if (s == "l1") return Selector::L1;
    if (s == "mi") return Selector::MI;
    if (s == "cfs") return Selector::CFS;
    throw Error("unknown selector '" + s + "' (expected none, rfe, l1, mi or cfs)");
}

Tuner tuner_from_string(const std::string& s) {
    if (s == "none") return Tuner::None;
    if (s == "grid") return Tuner::Grid;
    if (s == "random") return Tuner::Random;
    if (s == "ga") return Tuner::GA;
    throw Error("unknown tuner '" + s + "' (expected none, grid, random or ga)");
}

std::string CellKey::str() const {
    return to_string(selector) + "/" + to_string(model) + "/" + to_string(tuner);
}

void AccessRecorder::record_fit(std::size_t fold, const std::vector<std::size_t>& rows) {
    std::lock_guard<std::mutex> lock(mutex);
    fit_rows[fold].insert(rows.begin(), rows.end());
}

void AccessRecorder::record_predict(std::size_t fold, const std::vector<std::size_t>& rows) {
    std::lock_guard<std::mutex> lock(mutex);
    predict_rows[fold].insert(rows.begin(), rows.end());
}

double CellResult::mean_train_accuracy() const {
    if (folds.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& f : folds) acc += f.train_accuracy;
    return acc / static_cast<double>(folds.size());
}

double CellResult::tuning_seconds_total() const {
    double acc = 0.0;
    for (const auto& f : folds) acc += f.tuning_seconds;
    return acc;
}

const CellResult* RunLedger::find(const CellKey& key) const {
    for (const auto& c : cells)
        if (c.key == key) return &c;
    return nullptr;
}

search::ParamSpace default_space(Model m) {
    ParamSpace sp;
    switch (m) {
        case Model::RF:
            sp.dims = {
                {"n_estimators", search::Domain::finite({Value{50.0}, Value{100.0}, Value{200.0}})},
                // 0 encodes an unlimited depth
                {"max_depth",
                 search::Domain::finite({Value{0.0}, Value{5.0}, Value{10.0}, Value{20.0}})},
                {"min_samples_split", search::Domain::finite({Value{2.0}, Value{5.0}, Value{10.0}})},
                {"min_samples_leaf", search::Domain::finite({Value{1.0}, Value{2.0}, Value{4.0}})},
            };
            break;
        case Model::LR:
            sp.dims = {
                {"C", search::Domain::finite(
                          {Value{0.01}, Value{0.1}, Value{1.0}, Value{10.0}, Value{100.0}})},
                {"penalty", search::Domain::finite({Value{std::string("l1")},
                                                    Value{std::string("l2")}})},
            };
            break;
        case Model::SVM:
            sp.dims = {
                {"C", search::Domain::finite({Value{0.1}, Value{1.0}, Value{10.0}, Value{100.0}})},
                {"kernel", search::Domain::finite({Value{std::string("linear")},
                                                   Value{std::string("rbf")}})},
                {"gamma", search::Domain::finite({Value{std::string("scale")}, Value{0.01},
                                                  Value{0.1}, Value{1.0}})},
            };
            // gamma is inert under the linear kernel; canonicalize it away so
            // memoization treats such points as equal.
            sp.canonical = [](ParamPoint& p) {
                if (std::get<std::string>(p.at("kernel")) == "linear")
                    p.values["gamma"] = std::string("scale");
            };
            break;
    }
    return sp;
}

search::ParamPoint default_point(Model m) {
    ParamPoint p;
    switch (m) {
        case Model::RF:
            // Untuned baseline: one fully grown Gini tree.
            p.values = {{"n_estimators", Value{1.0}},
                        {"max_depth", Value{0.0}},
                        {"min_samples_split", Value{2.0}},
                        {"min_samples_leaf", Value{1.0}}};
            break;
        case Model::LR:
            p.values = {{"C", Value{1.0}}, {"penalty", Value{std::string("l2")}}};
            break;
        case Model::SVM:
            p.values = {{"C", Value{1.0}},
                        {"kernel", Value{std::string("rbf")}},
                        {"gamma", Value{std::string("scale")}}};
            break;
    }
    return p;
}

Dataset load_and_clean(const ExperimentConfig& cfg) {
    if (cfg.dataset_paths.empty()) throw Error("no dataset files given");
    std::vector<Dataset> parts;
    parts.reserve(cfg.dataset_paths.size());
    for (const auto& path : cfg.dataset_paths) parts.push_back(corpus::load_csv(path, cfg.schema));
    Dataset pooled = parts.size() == 1 ? std::move(parts.front()) : corpus::pool(parts);
    return corpus::deduplicate(pooled);
}

namespace {

// ---------------------------------------------------------------------------
// Model dispatch

struct TrainedModel {
    Model kind = Model::RF;
    LinearModel lr;
    ForestModel rf;
    SvmModel svm;
};

classifiers::RfParams rf_params_from(const ParamPoint& p, std::uint64_t seed) {
    classifiers::RfParams out;
    out.n_estimators = static_cast<std::size_t>(p.num("n_estimators"));
    out.max_depth = static_cast<std::size_t>(p.num("max_depth"));
    out.min_samples_split = static_cast<std::size_t>(p.num("min_samples_split"));
    out.min_samples_leaf = static_cast<std::size_t>(p.num("min_samples_leaf"));
    // A node below min_samples_leaf can never split (children must each hold
    // min_samples_leaf rows), so lifting the split floor to the leaf floor
    // changes nothing behaviorally while satisfying the params invariant.
    out.min_samples_split = std::max(out.min_samples_split, out.min_samples_leaf);
    out.seed = seed;
    return out;
}

classifiers::LrParams lr_params_from(const ParamPoint& p) {
    classifiers::LrParams out;
    out.C = p.num("C");
    out.penalty = p.str("penalty") == "l1" ? classifiers::Penalty::L1 : classifiers::Penalty::L2;
    return out;
}

classifiers::SvmParams svm_params_from(const ParamPoint& p) {
    classifiers::SvmParams out;
    out.C = p.num("C");
    out.kernel = p.str("kernel") == "linear" ? classifiers::Kernel::Linear
                                             : classifiers::Kernel::Rbf;
    const Value& g = p.at("gamma");
    if (std::holds_alternative<double>(g))
        out.gamma = std::get<double>(g);
    else if (std::get<std::string>(g) != "scale")
        throw Error("svm gamma must be numeric or 'scale'");
    return out;
}

TrainedModel train_model(Model kind, const ParamPoint& p, const Matrix& X,
                         const std::vector<int>& y, std::uint64_t seed) {
    TrainedModel out;
    out.kind = kind;
    switch (kind) {
        case Model::RF: out.rf = classifiers::train_rf(X, y, rf_params_from(p, seed)); break;
        case Model::LR: out.lr = classifiers::train_lr(X, y, lr_params_from(p)); break;
        case Model::SVM: out.svm = classifiers::train_svm(X, y, svm_params_from(p)); break;
    }
    return out;
}

std::vector<int> predict_model(const TrainedModel& m, const Matrix& X) {
    switch (m.kind) {
        case Model::RF: return classifiers::predict_rf(m.rf, X);
        case Model::LR: return classifiers::predict_lr(m.lr, X);
        case Model::SVM: return classifiers::predict_svm(m.svm, X);
    }
    throw Error("unreachable");
}

double accuracy_of(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    return evaluation::metrics(evaluation::confusion(y_true, y_pred)).accuracy;
}

// ---------------------------------------------------------------------------
// Session: shared preparations and the cross-search fitness cache.

struct InnerSet {
    Matrix Xtr, Xte;
    std::vector<int> ytr, yte;
};

struct FoldPrep {
    std::vector<std::size_t> train_idx, test_idx;
    Matrix Xtr, Xte;  // imputed + scaled (or pass-through in global mode)
    std::vector<int> ytr, yte;
};

struct SelPrep {
    std::vector<std::size_t> retained;
    std::vector<double> scores;
    Matrix X_res;  // selected + resampled training matrix
    std::vector<int> y_res;
    Matrix X_test;  // selected test matrix
    std::vector<int> y_test;
    std::vector<InnerSet> inner;  // gathered inner-CV sets (3-fold)
};

constexpr std::size_t kInnerFolds = 3;

class Session {
public:
    Session(const ExperimentConfig& cfg, const Dataset& data, crossval::FoldPlan plan,
            AccessRecorder* recorder)
        : cfg_(cfg), recorder_(recorder), plan_(std::move(plan)) {
        if (cfg_.global_resample) {
            // Leaky ablation: impute/scale/resample once over everything,
            // then fold the enlarged dataset.
            working_ = data;
            const auto imputer = preprocess::fit_imputer(working_.X, cfg_.imputer_k);
            Matrix filled = preprocess::apply_imputer(imputer, working_.X);
            const auto scaler = preprocess::fit_scaler(filled);
            filled = preprocess::apply_scaler(scaler, filled);
            resample::AdasynConfig rc = cfg_.adasyn;
            rc.seed = rng::derive(cfg_.seed, {rng::hash_label("global-adasyn")});
            auto res = resample::adasyn(filled, working_.y, rc);
            working_.X = std::move(res.X);
            working_.y = std::move(res.y);
            working_.tags.resize(working_.y.size());
            plan_ = crossval::stratified_folds(
                working_.y, cfg_.k_folds, rng::derive(cfg_.seed, {rng::hash_label("fold-plan")}));
            if (recorder_) {
                std::vector<std::size_t> all(data.rows());
                for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
                for (std::size_t f = 0; f < plan_.k; ++f) recorder_->record_fit(f, all);
            }
        } else {
            working_ = data;
        }
    }

    const crossval::FoldPlan& plan() const { return plan_; }
    const Dataset& working() const { return working_; }

    const FoldPrep& fold_prep(std::size_t fold) {
        std::lock_guard<std::mutex> lock(prep_mutex_);
        auto it = fold_prep_.find(fold);
        if (it != fold_prep_.end()) return it->second;

        FoldPrep prep;
        std::tie(prep.train_idx, prep.test_idx) = crossval::fold_split(plan_, fold);
        if (recorder_ && !cfg_.global_resample) recorder_->record_fit(fold, prep.train_idx);
        if (recorder_) recorder_->record_predict(fold, prep.test_idx);

        Matrix Xtr = working_.X.gather_rows(prep.train_idx);
        Matrix Xte = working_.X.gather_rows(prep.test_idx);
        prep.ytr.reserve(prep.train_idx.size());
        for (std::size_t i : prep.train_idx) prep.ytr.push_back(working_.y[i]);
        prep.yte.reserve(prep.test_idx.size());
        for (std::size_t i : prep.test_idx) prep.yte.push_back(working_.y[i]);

        if (cfg_.global_resample) {
            // Already imputed and scaled globally.
            prep.Xtr = std::move(Xtr);
            prep.Xte = std::move(Xte);
        } else {
            const auto imputer = preprocess::fit_imputer(Xtr, cfg_.imputer_k);
            prep.Xtr = preprocess::apply_imputer(imputer, Xtr);
            const auto scaler = preprocess::fit_scaler(prep.Xtr);
            prep.Xtr = preprocess::apply_scaler(scaler, prep.Xtr);
            prep.Xte = preprocess::apply_scaler(scaler, preprocess::apply_imputer(imputer, Xte));
        }
        return fold_prep_.emplace(fold, std::move(prep)).first->second;
    }

    const SelPrep& sel_prep(Selector sel, std::size_t fold) {
        const std::uint64_t key = (static_cast<std::uint64_t>(sel) << 32) | fold;
        {
            std::lock_guard<std::mutex> lock(sel_mutex_);
            auto it = sel_prep_.find(key);
            if (it != sel_prep_.end()) return it->second;
        }
        const FoldPrep& base = fold_prep(fold);

        SelPrep prep;
        feature_selection::SelectorConfig scfg = cfg_.selector_cfg;
        scfg.seed = rng::derive(cfg_.seed,
                                {rng::hash_label("selector"), static_cast<std::uint64_t>(sel), fold});
        switch (sel) {
            case Selector::None: {
                prep.retained.resize(base.Xtr.cols());
                for (std::size_t j = 0; j < base.Xtr.cols(); ++j) prep.retained[j] = j;
                break;
            }
            case Selector::RFE: {
                auto sub = feature_selection::select_rfe(base.Xtr, base.ytr, scfg);
                prep.retained = sub.indices;
                prep.scores = sub.scores;
                break;
            }
            case Selector::L1: {
                auto sub = feature_selection::select_l1(base.Xtr, base.ytr, scfg);
                prep.retained = sub.indices;
                prep.scores = sub.scores;
                break;
            }
            case Selector::MI: {
                auto sub = feature_selection::select_mi(base.Xtr, base.ytr, scfg);
                prep.retained = sub.indices;
                prep.scores = sub.scores;
                break;
            }
            case Selector::CFS: {
                auto sub = feature_selection::select_cfs(base.Xtr, base.ytr, scfg);
                prep.retained = sub.indices;
                prep.scores = sub.scores;
                break;
            }
        }

        Matrix Xtr_sel = base.Xtr.gather_cols(prep.retained);
        prep.X_test = base.Xte.gather_cols(prep.retained);
        prep.y_test = base.yte;

        if (cfg_.global_resample) {
            prep.X_res = std::move(Xtr_sel);
            prep.y_res = base.ytr;
        } else {
            resample::AdasynConfig rc = cfg_.adasyn;
            rc.seed = rng::derive(
                cfg_.seed, {rng::hash_label("adasyn"), static_cast<std::uint64_t>(sel), fold});
            auto res = resample::adasyn(Xtr_sel, base.ytr, rc);
            prep.X_res = std::move(res.X);
            prep.y_res = std::move(res.y);
        }

        // Inner 3-fold fitness sets, shared by every model and tuner.
        const auto inner_plan = crossval::stratified_folds(
            prep.y_res, kInnerFolds,
            rng::derive(cfg_.seed,
                        {rng::hash_label("inner-folds"), static_cast<std::uint64_t>(sel), fold}));
        prep.inner.resize(kInnerFolds);
        for (std::size_t f = 0; f < kInnerFolds; ++f) {
            auto [itr, ite] = crossval::fold_split(inner_plan, f);
            prep.inner[f].Xtr = prep.X_res.gather_rows(itr);
            prep.inner[f].Xte = prep.X_res.gather_rows(ite);
            prep.inner[f].ytr.reserve(itr.size());
            for (std::size_t i : itr) prep.inner[f].ytr.push_back(prep.y_res[i]);
            prep.inner[f].yte.reserve(ite.size());
            for (std::size_t i : ite) prep.inner[f].yte.push_back(prep.y_res[i]);
        }

        std::lock_guard<std::mutex> lock(sel_mutex_);
        return sel_prep_.emplace(key, std::move(prep)).first->second;
    }

    std::string fitness_key(Selector sel, Model model, std::size_t fold,
                            const ParamPoint& point) const {
        return to_string(sel) + "|" + to_string(model) + "|" + std::to_string(fold) + "|" +
               point.key();
    }

    std::uint64_t inner_model_seed(Selector sel, Model model, std::size_t fold,
                                   std::size_t inner) const {
        return rng::derive(cfg_.seed,
                           {rng::hash_label("inner-model"), static_cast<std::uint64_t>(sel),
                            static_cast<std::uint64_t>(model), fold, inner});
    }

    // Mean accuracy/F1 over the inner CV; pure in (selector, model, fold,
    // point), so the cache is shared across tuners and cells.
    Fitness fitness(Selector sel, Model model, std::size_t fold, const ParamPoint& point,
                    const ParamSpace& space) {
        const std::string key = fitness_key(sel, model, fold, point);
        {
            std::lock_guard<std::mutex> lock(fitness_mutex_);
            auto it = fitness_cache_.find(key);
            if (it != fitness_cache_.end()) return it->second;
        }

        // Forests with the same seed share their leading trees, so one
        // max-size forest scores every tree-count value in the space at once.
        if (model == Model::RF) {
            std::vector<std::size_t> t_values;
            for (const auto& [name, dom] : space.dims) {
                if (name != "n_estimators" || dom.kind != search::Domain::Kind::Finite) continue;
                for (const auto& v : dom.values)
                    if (std::holds_alternative<double>(v))
                        t_values.push_back(static_cast<std::size_t>(std::get<double>(v)));
            }
            std::sort(t_values.begin(), t_values.end());
            t_values.erase(std::unique(t_values.begin(), t_values.end()), t_values.end());
            const std::size_t t_point = static_cast<std::size_t>(point.num("n_estimators"));
            if (t_values.size() > 1 &&
                std::find(t_values.begin(), t_values.end(), t_point) != t_values.end()) {
                batched_rf_fitness(sel, fold, point, t_values);
                std::lock_guard<std::mutex> lock(fitness_mutex_);
                return fitness_cache_.at(key);
            }
        }

        const SelPrep& prep = sel_prep(sel, fold);
        Fitness f;
        for (std::size_t inner = 0; inner < kInnerFolds; ++inner) {
            const InnerSet& set = prep.inner[inner];
            const TrainedModel m = train_model(model, point, set.Xtr, set.ytr,
                                               inner_model_seed(sel, model, fold, inner));
            const auto fm = evaluation::metrics(
                evaluation::confusion(set.yte, predict_model(m, set.Xte)));
            f.accuracy += fm.accuracy;
            f.f1 += fm.f1;
        }
        f.accuracy /= static_cast<double>(kInnerFolds);
        f.f1 /= static_cast<double>(kInnerFolds);
        std::lock_guard<std::mutex> lock(fitness_mutex_);
        fitness_cache_.emplace(key, f);
        return f;
    }

    void batched_rf_fitness(Selector sel, std::size_t fold, const ParamPoint& point,
                            const std::vector<std::size_t>& t_values) {
        const SelPrep& prep = sel_prep(sel, fold);
        std::vector<Fitness> acc(t_values.size());
        for (std::size_t inner = 0; inner < kInnerFolds; ++inner) {
            const InnerSet& set = prep.inner[inner];
            ParamPoint big = point;
            big.values["n_estimators"] = static_cast<double>(t_values.back());
            const auto params =
                rf_params_from(big, inner_model_seed(sel, Model::RF, fold, inner));
            const ForestModel forest = classifiers::train_rf(set.Xtr, set.ytr, params);
            const auto labels = classifiers::predict_rf_prefixes(forest, set.Xte, t_values);
            for (std::size_t k = 0; k < t_values.size(); ++k) {
                const auto fm =
                    evaluation::metrics(evaluation::confusion(set.yte, labels[k]));
                acc[k].accuracy += fm.accuracy;
                acc[k].f1 += fm.f1;
            }
        }
        std::lock_guard<std::mutex> lock(fitness_mutex_);
        for (std::size_t k = 0; k < t_values.size(); ++k) {
            ParamPoint variant = point;
            variant.values["n_estimators"] = static_cast<double>(t_values[k]);
            acc[k].accuracy /= static_cast<double>(kInnerFolds);
            acc[k].f1 /= static_cast<double>(kInnerFolds);
            fitness_cache_.emplace(fitness_key(sel, Model::RF, fold, variant), acc[k]);
        }
    }

    FoldOutcome run_cell_fold(const CellKey& cell, std::size_t fold) {
        const SelPrep& prep = sel_prep(cell.selector, fold);
        FoldOutcome out;
        out.retained = prep.retained;

        const ParamSpace space = space_for(cell.model);
        search::FitnessFn fn = [&](const ParamPoint& p) {
            return fitness(cell.selector, cell.model, fold, p, space);
        };

        const auto t_tune = std::chrono::steady_clock::now();
        switch (cell.tuner) {
            case Tuner::None: out.chosen = space.canonicalize(default_point(cell.model)); break;
            case Tuner::Grid: {
                auto r = search::grid_search(space, fn);
                out.chosen = r.best;
                out.tuner_evals = r.evals;
                break;
            }
            case Tuner::Random: {
                auto r = search::random_search(
                    space, fn, cfg_.random_budget,
                    rng::derive(cfg_.seed, {rng::hash_label("tuner"),
                                            static_cast<std::uint64_t>(cell.selector),
                                            static_cast<std::uint64_t>(cell.model),
                                            static_cast<std::uint64_t>(cell.tuner), fold}));
                out.chosen = r.best;
                out.tuner_evals = r.evals;
                break;
            }
            case Tuner::GA: {
                search::GaConfig gc = cfg_.ga;
                gc.seed = rng::derive(cfg_.seed, {rng::hash_label("tuner"),
                                                  static_cast<std::uint64_t>(cell.selector),
                                                  static_cast<std::uint64_t>(cell.model),
                                                  static_cast<std::uint64_t>(cell.tuner), fold});
                auto r = search::ga_search(space, fn, gc);
                out.chosen = r.best;
                out.tuner_evals = r.evals;
                break;
            }
        }
        if (cell.tuner != Tuner::None) out.tuning_seconds = seconds_since(t_tune);

        // Final model on the full resampled training partition. The seed is
        // tuner-independent so cells that choose the same point train the
        // same model.
        const std::uint64_t final_seed =
            rng::derive(cfg_.seed, {rng::hash_label("final-model"),
                                    static_cast<std::uint64_t>(cell.selector),
                                    static_cast<std::uint64_t>(cell.model), fold});
        const auto t_train = std::chrono::steady_clock::now();
        const TrainedModel m = train_model(cell.model, out.chosen, prep.X_res, prep.y_res,
                                           final_seed);
        const double train_seconds = seconds_since(t_train);

        const auto t_test = std::chrono::steady_clock::now();
        const std::vector<int> y_pred = predict_model(m, prep.X_test);
        const double test_seconds = seconds_since(t_test);

        out.metrics = evaluation::metrics(evaluation::confusion(prep.y_test, y_pred));
        out.metrics.train_seconds = train_seconds;
        out.metrics.test_seconds = test_seconds;
        out.train_accuracy = accuracy_of(prep.y_res, predict_model(m, prep.X_res));
        return out;
    }

    ParamSpace space_for(Model m) const {
        auto it = cfg_.space_override.find(m);
        return it != cfg_.space_override.end() ? it->second : default_space(m);
    }

private:
    const ExperimentConfig& cfg_;
    AccessRecorder* recorder_;
    crossval::FoldPlan plan_;
    Dataset working_;

    std::mutex prep_mutex_;
    std::unordered_map<std::size_t, FoldPrep> fold_prep_;
    std::mutex sel_mutex_;
    std::unordered_map<std::uint64_t, SelPrep> sel_prep_;
    std::mutex fitness_mutex_;
    std::unordered_map<std::string, Fitness> fitness_cache_;
};

std::string fingerprint_of(const ExperimentConfig& cfg, const CellKey& cell) {
    std::string fp = "cell=" + cell.str() + " seed=" + std::to_string(cfg.seed) +
                     " folds=" + std::to_string(cfg.k_folds) +
                     " adasyn_k=" + std::to_string(cfg.adasyn.k_neighbors) +
                     " balance=" + std::to_string(cfg.adasyn.balance_target);
    if (cell.tuner == Tuner::GA)
        fp += " ga_pop=" + std::to_string(cfg.ga.population) +
              " ga_gens=" + std::to_string(cfg.ga.generations) +
              " ga_cx=" + std::to_string(cfg.ga.crossover_rate) +
              " ga_mut=" + std::to_string(cfg.ga.mutation_rate) +
              " ga_elite=" + std::to_string(cfg.ga.elitism);
    if (cell.tuner == Tuner::Random) fp += " budget=" + std::to_string(cfg.random_budget);
    return fp;
}

std::vector<CellKey> requested_cells(const ExperimentConfig& cfg) {
    std::vector<CellKey> cells;
    for (Selector s : cfg.selectors)
        for (Model m : cfg.models)
            for (Tuner t : cfg.tuners) cells.push_back({s, m, t});
    if (cfg.include_baseline) {
        for (Model m : cfg.models) {
            const CellKey base{Selector::None, m, Tuner::None};
            if (std::find(cells.begin(), cells.end(), base) == cells.end())
                cells.push_back(base);
        }
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

}  // namespace

FoldOutcome run_fold(const ExperimentConfig& cfg, const Dataset& data,
                     const crossval::FoldPlan& plan, const CellKey& cell, std::size_t fold,
                     AccessRecorder* recorder) {
    Session session(cfg, data, plan, recorder);
    return session.run_cell_fold(cell, fold);
}

RunLedger run_matrix(const ExperimentConfig& cfg, const Dataset& data, AccessRecorder* recorder) {
    data.check();
    crossval::FoldPlan plan = crossval::stratified_folds(
        data.y, cfg.k_folds, rng::derive(cfg.seed, {rng::hash_label("fold-plan")}));
    Session session(cfg, data, plan, recorder);

    const std::vector<CellKey> cells = requested_cells(cfg);

    RunLedger ledger;
    ledger.plan = session.plan();
    ledger.n_rows = session.working().rows();
    ledger.n_features = data.X.cols();
    ledger.cells.resize(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        ledger.cells[c].key = cells[c];
        ledger.cells[c].folds.resize(cfg.k_folds);
    }

#ifdef _OPENMP
    if (cfg.jobs > 0) omp_set_num_threads(static_cast<int>(cfg.jobs));
#endif

    // Shared preparations first, so the parallel loop below only reads them.
    std::vector<std::string> cell_errors(cells.size());
    {
        std::set<Selector> sels;
        for (const auto& cell : cells) sels.insert(cell.selector);
        for (std::size_t f = 0; f < cfg.k_folds; ++f) {
            try {
                session.fold_prep(f);
            } catch (const std::exception& e) {
                throw Error("fold " + std::to_string(f) + ": " + e.what());
            }
            for (Selector s : sels) {
                try {
                    session.sel_prep(s, f);
                } catch (const std::exception& e) {
                    const std::string msg = "fold " + std::to_string(f) + ": " + e.what();
                    for (std::size_t c = 0; c < cells.size(); ++c)
                        if (cells[c].selector == s && cell_errors[c].empty())
                            cell_errors[c] = msg;
                }
            }
        }
    }

    struct Task {
        std::size_t cell;
        std::size_t fold;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (!cell_errors[c].empty()) continue;
        for (std::size_t f = 0; f < cfg.k_folds; ++f) tasks.push_back({c, f});
    }

    std::mutex error_mutex;
    const std::ptrdiff_t n_tasks = static_cast<std::ptrdiff_t>(tasks.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < n_tasks; ++t) {
        const Task task = tasks[static_cast<std::size_t>(t)];
        try {
            ledger.cells[task.cell].folds[task.fold] =
                session.run_cell_fold(cells[task.cell], task.fold);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (cell_errors[task.cell].empty())
                cell_errors[task.cell] = "fold " + std::to_string(task.fold) + ": " + e.what();
        }
    }

    for (std::size_t c = 0; c < cells.size(); ++c) {
        CellResult& cell = ledger.cells[c];
        if (!cell_errors[c].empty()) {
            cell.failed = true;
            cell.error = cell_errors[c];
            cell.folds.clear();
            continue;
        }
        std::vector<evaluation::FoldMetrics> fm;
        fm.reserve(cell.folds.size());
        for (const auto& f : cell.folds) fm.push_back(f.metrics);
        cell.report = evaluation::aggregate(fm);
        cell.report.fingerprint = fingerprint_of(cfg, cell.key);
    }
    return ledger;
}

RunLedger run_matrix(const ExperimentConfig& cfg, AccessRecorder* recorder) {
    const Dataset data = load_and_clean(cfg);
    return run_matrix(cfg, data, recorder);
}

}  // namespace faultforge::pipeline
