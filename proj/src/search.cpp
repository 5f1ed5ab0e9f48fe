#include "faultforge/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "faultforge/errors.hpp"
#include "faultforge/rng.hpp"

namespace faultforge::search {

std::string value_to_string(const Value& v) {
    if (std::holds_alternative<std::string>(v)) return std::get<std::string>(v);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(v));
    return buf;
}

Domain Domain::log_uniform(double lo, double hi) {
    Domain d;
    d.kind = Kind::LogUniform;
    d.lo = lo;
    d.hi = hi;
    return d;
}

const Value& ParamPoint::at(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw Error("param point is missing dim '" + name + "'");
    return it->second;
}

double ParamPoint::num(const std::string& name) const { return std::get<double>(at(name)); }

std::string ParamPoint::str(const std::string& name) const {
    return std::get<std::string>(at(name));
}

std::string ParamPoint::key() const {
    std::string out;
    for (const auto& [name, value] : values) {
        out += name;
        out += '=';
        out += value_to_string(value);
        out += ';';
    }
    return out;
}

void ParamSpace::validate() const {
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const auto& [name, dom] = dims[i];
        if (name.empty()) throw Error("param space: empty dim name");
        for (std::size_t j = i + 1; j < dims.size(); ++j)
            if (dims[j].first == name) throw Error("param space: duplicate dim '" + name + "'");
        if (dom.kind == Domain::Kind::Finite) {
            if (dom.values.empty()) throw Error("param space: dim '" + name + "' has no values");
        } else {
            if (!(dom.lo > 0.0 && dom.lo < dom.hi))
                throw Error("param space: dim '" + name + "' needs 0 < lo < hi");
        }
    }
}

bool ParamSpace::all_finite() const {
    return std::all_of(dims.begin(), dims.end(),
                       [](const auto& d) { return d.second.kind == Domain::Kind::Finite; });
}

bool ParamSpace::contains(const ParamPoint& p) const {
    if (p.values.size() != dims.size()) return false;
    for (const auto& [name, dom] : dims) {
        auto it = p.values.find(name);
        if (it == p.values.end()) return false;
        if (dom.kind == Domain::Kind::Finite) {
            if (std::find(dom.values.begin(), dom.values.end(), it->second) == dom.values.end())
                return false;
        } else {
            if (!std::holds_alternative<double>(it->second)) return false;
            const double v = std::get<double>(it->second);
            if (!(v >= dom.lo && v <= dom.hi)) return false;
        }
    }
    return true;
}

ParamPoint ParamSpace::canonicalize(ParamPoint p) const {
    if (canonical) canonical(p);
    return p;
}

namespace {

// Shared memo so every strategy pays for a distinct point at most once.
class Evaluator {
public:
    Evaluator(const ParamSpace& space, const FitnessFn& fit) : space_(space), fit_(fit) {}

    Fitness eval(const ParamPoint& raw, ParamPoint* canon_out = nullptr) {
        ParamPoint canon = space_.canonicalize(raw);
        const std::string key = canon.key();
        if (canon_out) *canon_out = canon;
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        const Fitness f = fit_(canon);
        ++evals_;
        memo_.emplace(std::move(key), f);
        return f;
    }

    std::size_t evals() const { return evals_; }

private:
    const ParamSpace& space_;
    const FitnessFn& fit_;
    std::unordered_map<std::string, Fitness> memo_;
    std::size_t evals_ = 0;
};

ParamPoint sample_point(const ParamSpace& space, rng::Engine& eng) {
    ParamPoint p;
    for (const auto& [name, dom] : space.dims) {
        if (dom.kind == Domain::Kind::Finite) {
            p.values[name] = dom.values[eng.below(dom.values.size())];
        } else {
            p.values[name] = std::exp(eng.uniform(std::log(dom.lo), std::log(dom.hi)));
        }
    }
    return p;
}

}  // namespace

SearchResult grid_search(const ParamSpace& space, const FitnessFn& fit) {
    space.validate();
    if (!space.all_finite())
        throw GridInfeasibleError("grid search requires finite dims; found an interval dim");
    if (space.dims.empty()) throw Error("grid search on an empty space");

    Evaluator ev(space, fit);
    SearchResult result;
    bool have_best = false;

    std::vector<std::size_t> odometer(space.dims.size(), 0);
    for (;;) {
        ParamPoint p;
        for (std::size_t d = 0; d < space.dims.size(); ++d)
            p.values[space.dims[d].first] = space.dims[d].second.values[odometer[d]];
        ParamPoint canon;
        const Fitness f = ev.eval(p, &canon);
        if (!have_best || fitness_better(f, result.fitness)) {
            have_best = true;
            result.best = canon;
            result.fitness = f;
        }
        // Odometer with the last dim fastest; first improvement wins ties.
        std::size_t d = space.dims.size();
        while (d > 0) {
            --d;
            if (++odometer[d] < space.dims[d].second.values.size()) break;
            odometer[d] = 0;
            if (d == 0) {
                result.evals = ev.evals();
                return result;
            }
        }
    }
}

SearchResult random_search(const ParamSpace& space, const FitnessFn& fit, std::size_t n_samples,
                           std::uint64_t seed) {
    space.validate();
    if (n_samples < 1) throw Error("random search needs n_samples >= 1");

    rng::Engine eng(rng::derive(seed, {rng::hash_label("random-search")}));
    Evaluator ev(space, fit);
    SearchResult result;
    bool have_best = false;
    for (std::size_t s = 0; s < n_samples; ++s) {
        ParamPoint canon;
        const Fitness f = ev.eval(sample_point(space, eng), &canon);
        if (!have_best || fitness_better(f, result.fitness)) {
            have_best = true;
            result.best = canon;
            result.fitness = f;
        }
    }
    result.evals = ev.evals();
    return result;
}

SearchResult ga_search(const ParamSpace& space, const FitnessFn& fit, const GaConfig& cfg) {
    space.validate();
    if (cfg.population < 2) throw Error("GA needs population >= 2");
    if (cfg.elitism >= cfg.population) throw Error("GA elitism must be < population");

    rng::Engine eng(rng::derive(cfg.seed, {rng::hash_label("ga-search")}));
    Evaluator ev(space, fit);

    struct Individual {
        ParamPoint point;
        Fitness fitness;
    };
    auto better = [](const Individual& a, const Individual& b) {
        return fitness_better(a.fitness, b.fitness);
    };

    std::vector<Individual> pop(cfg.population);
    for (auto& ind : pop) {
        ParamPoint raw = sample_point(space, eng);
        ind.fitness = ev.eval(raw, &ind.point);
    }
    std::stable_sort(pop.begin(), pop.end(), better);

    SearchResult result;
    result.best = pop.front().point;
    result.fitness = pop.front().fitness;
    result.history.push_back(pop.front().fitness.accuracy);

    for (std::size_t gen = 0; gen < cfg.generations; ++gen) {
        std::vector<Individual> next(pop.begin(),
                                     pop.begin() + static_cast<std::ptrdiff_t>(cfg.elitism));

        // pop is sorted best-first, so the lowest drawn index wins.
        auto tournament = [&]() -> const Individual& {
            std::size_t winner = static_cast<std::size_t>(eng.below(pop.size()));
            for (std::size_t t = 1; t < cfg.tournament_size; ++t)
                winner = std::min(winner, static_cast<std::size_t>(eng.below(pop.size())));
            return pop[winner];
        };

        while (next.size() < cfg.population) {
            const Individual& a = tournament();
            const Individual& b = tournament();
            ParamPoint child = a.point;
            if (eng.uniform() < cfg.crossover_rate) {
                for (const auto& [name, dom] : space.dims) {
                    (void)dom;
                    if (eng.uniform() < 0.5) child.values[name] = b.point.at(name);
                }
            }
            for (const auto& [name, dom] : space.dims) {
                if (eng.uniform() >= cfg.mutation_rate) continue;
                if (dom.kind == Domain::Kind::Finite) {
                    child.values[name] = dom.values[eng.below(dom.values.size())];
                } else {
                    const double scale = std::exp(0.5 * eng.normal());
                    const double v = std::clamp(std::get<double>(child.at(name)) * scale, dom.lo,
                                                dom.hi);
                    child.values[name] = v;
                }
            }
            Individual ind;
            ind.fitness = ev.eval(child, &ind.point);
            next.push_back(std::move(ind));
        }

        pop = std::move(next);
        std::stable_sort(pop.begin(), pop.end(), better);
        if (fitness_better(pop.front().fitness, result.fitness)) {
            result.best = pop.front().point;
            result.fitness = pop.front().fitness;
        }
        result.history.push_back(pop.front().fitness.accuracy);
    }

    result.evals = ev.evals();
    return result;
}

}  // namespace faultforge::search
