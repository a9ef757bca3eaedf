#ifndef FLOODOPT_NSGA2_HPP
#define FLOODOPT_NSGA2_HPP

// NSGA-II: fast non-dominated sorting, crowding distance and the reference main loop.

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "floodopt/errors.hpp"
#include "floodopt/evaluator.hpp"
#include "floodopt/pareto.hpp"
#include "floodopt/rng.hpp"
#include "floodopt/search.hpp"
#include "floodopt/spea2.hpp"

namespace floodopt {

/// Fronts of indices into `pts`, front 0 first; each front is in index order.
inline std::vector<std::vector<std::size_t>> fast_non_dominated_sort(const std::vector<ObjectiveVector>& pts)
{
    const std::size_t n = pts.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> count(n, 0);
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (dominates(pts[p], pts[q]))
                dominated[p].push_back(q);
            else if (dominates(pts[q], pts[p]))
                ++count[p];
        }
        if (count[p] == 0)
            fronts[0].push_back(p);
    }
    for (std::size_t i = 0; !fronts[i].empty(); ++i) {
        std::vector<std::size_t> next;
        for (std::size_t p : fronts[i])
            for (std::size_t q : dominated[p])
                if (--count[q] == 0)
                    next.push_back(q);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(next));
    }
    fronts.pop_back();
    return fronts;
}

/// Crowding distance for each member of `front` (indices into `pts`), aligned with `front`.
inline std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& pts,
                                             const std::vector<std::size_t>& front)
{
    const std::size_t n = front.size();
    std::vector<double> d(n, 0.0);
    if (n <= 2) {
        std::fill(d.begin(), d.end(), std::numeric_limits<double>::infinity());
        return d;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < 2; ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pts[front[a]][m] < pts[front[b]][m]; });
        const double lo = pts[front[order.front()]][m];
        const double hi = pts[front[order.back()]][m];
        d[order.front()] = d[order.back()] = std::numeric_limits<double>::infinity();
        if (!(hi > lo))
            continue;
        for (std::size_t j = 1; j + 1 < n; ++j)
            d[order[j]] += (pts[front[order[j + 1]]][m] - pts[front[order[j - 1]]][m]) / (hi - lo);
    }
    return d;
}

inline std::vector<double> crowding_distance(const std::vector<ObjectiveVector>& front)
{
    std::vector<std::size_t> all(front.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return crowding_distance(front, all);
}

struct Nsga2Selection {
    std::vector<std::size_t> chosen;
    std::vector<std::size_t> rank;
    std::vector<double> crowding;
};

/// Front-by-front fill to `n` members, the last partial front by descending crowding.
inline Nsga2Selection nsga2_select(const std::vector<ObjectiveVector>& pts, std::size_t n)
{
    Nsga2Selection s;
    const auto fronts = fast_non_dominated_sort(pts);
    for (std::size_t r = 0; r < fronts.size() && s.chosen.size() < n; ++r) {
        const auto& f = fronts[r];
        const auto cd = crowding_distance(pts, f);
        std::vector<std::size_t> order(f.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        if (s.chosen.size() + f.size() > n)
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cd[a] > cd[b]; });
        for (std::size_t k = 0; k < order.size() && s.chosen.size() < n; ++k) {
            s.chosen.push_back(f[order[k]]);
            s.rank.push_back(r);
            s.crowding.push_back(cd[order[k]]);
        }
    }
    return s;
}

/// Draw order per pair: two population indices for each parent, then the variation draws.
inline RunResult run_nsga2(FitnessCache& cache, std::size_t length, const BaselineConfig& cfg,
                           const RecordSink& sink = {})
{
    cfg.validate();
    if (cfg.population % 2 != 0)
        throw ConfigError("NSGA-II needs an even population size");
    Rng rng(cfg.seed);
    const double pm = cfg.mutation_prob < 0.0 ? default_mutation_prob(length) : cfg.mutation_prob;
    LedgerExtents extents;

    std::vector<BitString> genes;
    for (std::size_t n = 0; n < cfg.population; ++n)
        genes.push_back(random_genotype(length, rng));
    std::vector<Individual> population = evaluate_all(cache, genes);
    Nsga2Selection sel = nsga2_select(objectives_of(population), population.size());
    {
        std::vector<Individual> ordered;
        for (std::size_t i : sel.chosen)
            ordered.push_back(population[i]);
        population = std::move(ordered);
    }
    RunResult result;

    for (std::size_t t = 0;; ++t) {
        extents.update(cache);
        GenerationRecord rec;
        rec.algorithm = "nsga2";
        rec.t = t;
        rec.population = population.size();
        std::vector<Individual> first;
        for (std::size_t k = 0; k < population.size(); ++k)
            if (sel.rank[k] == 0)
                first.push_back(population[k]);
        rec.archive_size = first.size();
        rec.unique_evals = cache.unique_evaluations();
        rec.z_min_vec = {extents.lower()[0], extents.upper()[1]};
        rec.z_max_vec = {extents.upper()[0], extents.lower()[1]};
        rec.front = front_of(first);
        rec.hv = safe_normalized_hypervolume(rec.front, extents.lower(), extents.upper());
        if (sink)
            sink(rec);

        result.generations = t;
        if (t >= cfg.max_generations) {
            result.termination = "max_generations";
            result.front = std::move(first);
            break;
        }
        if (cfg.max_evaluations > 0 && cache.unique_evaluations() >= cfg.max_evaluations) {
            result.termination = "max_evaluations";
            result.front = std::move(first);
            break;
        }

        auto pick = [&] {
            const std::size_t i = rng.uniform_index(population.size());
            const std::size_t j = rng.uniform_index(population.size());
            if (sel.rank[j] != sel.rank[i])
                return sel.rank[j] < sel.rank[i] ? j : i;
            return sel.crowding[j] > sel.crowding[i] ? j : i;
        };
        genes.clear();
        for (std::size_t k = 0; k < cfg.population / 2; ++k) {
            const std::size_t a = pick();
            const std::size_t b = pick();
            auto [c1, c2] = make_children(population[a].genotype, population[b].genotype, cfg.crossover_prob, pm, rng);
            genes.push_back(std::move(c1));
            genes.push_back(std::move(c2));
        }
        std::vector<Individual> merged = population;
        auto offspring = evaluate_all(cache, genes);
        merged.insert(merged.end(), offspring.begin(), offspring.end());
        sel = nsga2_select(objectives_of(merged), cfg.population);
        population.clear();
        for (std::size_t i : sel.chosen)
            population.push_back(merged[i]);
    }
    result.unique_evals = cache.unique_evaluations();
    return result;
}

} // namespace floodopt

#endif
