#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace faultforge::search {

// A dimension value: numeric or categorical.
using Value = std::variant<double, std::string>;

std::string value_to_string(const Value& v);

struct Domain {
    enum class Kind { Finite, LogUniform };
    Kind kind = Kind::Finite;
    std::vector<Value> values;  // Finite
    double lo = 0.0, hi = 0.0;  // LogUniform interval, 0 < lo < hi

    static Domain finite(std::vector<Value> vs) { return {Kind::Finite, std::move(vs), 0, 0}; }
    static Domain log_uniform(double lo, double hi);
};

struct ParamPoint {
    std::map<std::string, Value> values;

    const Value& at(const std::string& name) const;
    double num(const std::string& name) const;
    std::string str(const std::string& name) const;
    std::string key() const;  // canonical "name=value;..." string
    bool operator==(const ParamPoint&) const = default;
};

struct ParamSpace {
    std::vector<std::pair<std::string, Domain>> dims;
    // Optional rewrite applied before evaluation and memo lookup, e.g.
    // collapsing gamma for linear kernels so equivalent points coincide.
    std::function<void(ParamPoint&)> canonical;

    void validate() const;
    bool all_finite() const;
    bool contains(const ParamPoint& p) const;
    ParamPoint canonicalize(ParamPoint p) const;
};

struct Fitness {
    double accuracy = 0.0;
    double f1 = 0.0;
};

// Higher accuracy wins, then higher F1; the caller's enumeration order
// breaks remaining ties.
inline bool fitness_better(const Fitness& a, const Fitness& b) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.f1 > b.f1;
}

using FitnessFn = std::function<Fitness(const ParamPoint&)>;

struct SearchResult {
    ParamPoint best;
    Fitness fitness;
    std::size_t evals = 0;           // FitnessFn invocations (memo hits excluded)
    std::vector<double> history;     // GA: per-generation best accuracy
};

struct GaConfig {
    std::size_t population = 20;
    std::size_t generations = 15;
    std::size_t tournament_size = 3;
    double crossover_rate = 0.9;
    double mutation_rate = 0.1;  // per gene
    std::size_t elitism = 1;
    std::uint64_t seed = 0;
};

// Full Cartesian product over finite dims; GridInfeasibleError on intervals.
SearchResult grid_search(const ParamSpace& space, const FitnessFn& fit);

// n_samples independent draws: finite dims uniform, intervals log-uniform.
SearchResult random_search(const ParamSpace& space, const FitnessFn& fit, std::size_t n_samples,
                           std::uint64_t seed);

// Tournament GA with uniform crossover, per-gene mutation and elitism;
// fitness memoized across the whole run.
SearchResult ga_search(const ParamSpace& space, const FitnessFn& fit, const GaConfig& cfg);

}  // namespace faultforge::search
