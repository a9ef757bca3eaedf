#ifndef FLOODOPT_SPEA2_HPP
#define FLOODOPT_SPEA2_HPP

// SPEA-2 fitness assignment, archive truncation and the reference main loop.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "floodopt/errors.hpp"
#include "floodopt/evaluator.hpp"
#include "floodopt/pareto.hpp"
#include "floodopt/rng.hpp"
#include "floodopt/search.hpp"

namespace floodopt {

using DistanceMatrix = std::vector<std::vector<double>>;

/// Pairwise L1 distances with each objective scaled by its range over `pts`.
/// An objective with zero range contributes nothing.
inline DistanceMatrix normalized_distances(const std::vector<ObjectiveVector>& pts)
{
    ObjectiveVector lo{}, hi{};
    if (!pts.empty()) {
        lo = hi = pts.front();
        for (const auto& p : pts)
            for (std::size_t i = 0; i < 2; ++i) {
                lo[i] = std::min(lo[i], p[i]);
                hi[i] = std::max(hi[i], p[i]);
            }
    }
    const std::size_t n = pts.size();
    DistanceMatrix d(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < 2; ++i)
                if (hi[i] > lo[i])
                    s += std::abs(pts[a][i] - pts[b][i]) / (hi[i] - lo[i]);
            d[a][b] = d[b][a] = s;
        }
    return d;
}

struct Spea2Fitness {
    std::vector<std::size_t> strength;
    std::vector<double> raw;
    std::vector<double> sigma; // k-th nearest normalised distance
    std::vector<double> density;
    std::vector<double> fitness;
};

inline std::size_t spea2_k(std::size_t population, std::size_t archive_size)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(population + archive_size))));
}

inline Spea2Fitness spea2_fitness(const std::vector<ObjectiveVector>& pts, std::size_t k, const DistanceMatrix& dist)
{
    const std::size_t n = pts.size();
    Spea2Fitness f;
    f.strength.assign(n, 0);
    f.raw.assign(n, 0.0);
    f.sigma.assign(n, 0.0);
    f.density.assign(n, 0.0);
    f.fitness.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (dominates(pts[i], pts[j]))
                ++f.strength[i];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (dominates(pts[j], pts[i]))
                f.raw[i] += static_cast<double>(f.strength[j]);
    std::vector<double> row;
    for (std::size_t i = 0; i < n; ++i) {
        row.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                row.push_back(dist[i][j]);
        if (!row.empty()) {
            const std::size_t kk = std::min(std::max<std::size_t>(k, 1), row.size()) - 1;
            std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk), row.end());
            f.sigma[i] = row[kk];
        }
        f.density[i] = 1.0 / (f.sigma[i] + 2.0);
        f.fitness[i] = f.raw[i] + f.density[i];
    }
    return f;
}

inline Spea2Fitness spea2_fitness(const std::vector<ObjectiveVector>& pts, std::size_t population,
                                  std::size_t archive_size)
{
    return spea2_fitness(pts, spea2_k(population, archive_size), normalized_distances(pts));
}

/// Removes, one at a time, the member whose sorted distance profile to the other
/// remaining members is lexicographically smallest (first such on ties).
inline std::vector<std::size_t> spea2_truncate(std::vector<std::size_t> members, std::size_t target,
                                               const DistanceMatrix& dist)
{
    while (members.size() > target && !members.empty()) {
        std::vector<std::vector<double>> profiles(members.size());
        for (std::size_t a = 0; a < members.size(); ++a) {
            for (std::size_t b = 0; b < members.size(); ++b)
                if (a != b)
                    profiles[a].push_back(dist[members[a]][members[b]]);
            std::sort(profiles[a].begin(), profiles[a].end());
        }
        std::size_t worst = 0;
        for (std::size_t a = 1; a < members.size(); ++a)
            if (profiles[a] < profiles[worst])
                worst = a;
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    return members;
}

/// Truncation of a standalone point set; returns the indices kept.
inline std::vector<std::size_t> spea2_truncate(const std::vector<ObjectiveVector>& pts, std::size_t target)
{
    std::vector<std::size_t> all(pts.size());
    std::iota(all.begin(), all.end(), 0);
    return spea2_truncate(all, target, normalized_distances(pts));
}

/// Next archive as indices into `pts`: all members with fitness below 1, filled by
/// (fitness, density, index) when short and truncated when long.
inline std::vector<std::size_t> spea2_environmental_selection(const std::vector<ObjectiveVector>& pts,
                                                              const Spea2Fitness& f, std::size_t archive_size,
                                                              const DistanceMatrix& dist)
{
    std::vector<std::size_t> chosen, rest;
    for (std::size_t i = 0; i < pts.size(); ++i)
        (f.fitness[i] < 1.0 ? chosen : rest).push_back(i);
    if (chosen.size() < archive_size) {
        std::sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
            if (f.fitness[a] != f.fitness[b])
                return f.fitness[a] < f.fitness[b];
            if (f.density[a] != f.density[b])
                return f.density[a] < f.density[b];
            return a < b;
        });
        for (std::size_t r = 0; r < rest.size() && chosen.size() < archive_size; ++r)
            chosen.push_back(rest[r]);
        std::sort(chosen.begin(), chosen.end());
    } else if (chosen.size() > archive_size) {
        chosen = spea2_truncate(chosen, archive_size, dist);
    }
    return chosen;
}

struct BaselineConfig {
    std::size_t population = 36;
    std::size_t archive_size = 36;
    std::size_t max_generations = 500;
    std::size_t max_evaluations = 0; // 0 = unlimited
    std::uint64_t seed = 0;
    double mutation_prob = -1.0;     // negative = 1/L
    double crossover_prob = 1.0;

    void validate() const
    {
        if (population == 0)
            throw ConfigError("population size must be positive");
        if (archive_size == 0)
            throw ConfigError("archive size must be positive");
        if (crossover_prob < 0.0 || crossover_prob > 1.0)
            throw ConfigError("crossover probability must lie in [0, 1]");
        if (mutation_prob > 1.0)
            throw ConfigError("mutation probability must not exceed 1");
    }
};

inline std::vector<ObjectiveVector> front_of(const std::vector<Individual>& xs)
{
    return pareto_front(objectives_of(xs));
}

/// Draw order per pair: two archive indices for each parent, then the variation draws.
inline RunResult run_spea2(FitnessCache& cache, std::size_t length, const BaselineConfig& cfg,
                           const RecordSink& sink = {})
{
    cfg.validate();
    Rng rng(cfg.seed);
    const double pm = cfg.mutation_prob < 0.0 ? default_mutation_prob(length) : cfg.mutation_prob;
    const std::size_t k = spea2_k(cfg.population, cfg.archive_size);
    LedgerExtents extents;

    std::vector<BitString> genes;
    for (std::size_t n = 0; n < cfg.population; ++n)
        genes.push_back(random_genotype(length, rng));
    std::vector<Individual> population = evaluate_all(cache, genes);
    std::vector<Individual> archive;
    RunResult result;

    for (std::size_t t = 0;; ++t) {
        std::vector<Individual> uni = population;
        uni.insert(uni.end(), archive.begin(), archive.end());
        const auto pts = objectives_of(uni);
        const auto dist = normalized_distances(pts);
        const auto fit = spea2_fitness(pts, k, dist);
        const auto keep = spea2_environmental_selection(pts, fit, cfg.archive_size, dist);
        std::vector<Individual> next;
        std::vector<double> next_fit;
        for (std::size_t i : keep) {
            next.push_back(uni[i]);
            next_fit.push_back(fit.fitness[i]);
        }
        archive = std::move(next);

        extents.update(cache);
        GenerationRecord rec;
        rec.algorithm = "spea2";
        rec.t = t;
        rec.population = population.size();
        rec.archive_size = archive.size();
        rec.unique_evals = cache.unique_evaluations();
        rec.z_min_vec = {extents.lower()[0], extents.upper()[1]};
        rec.z_max_vec = {extents.upper()[0], extents.lower()[1]};
        rec.front = front_of(archive);
        rec.hv = safe_normalized_hypervolume(rec.front, extents.lower(), extents.upper());
        if (sink)
            sink(rec);

        result.generations = t;
        if (t >= cfg.max_generations) {
            result.termination = "max_generations";
            break;
        }
        if (cfg.max_evaluations > 0 && cache.unique_evaluations() >= cfg.max_evaluations) {
            result.termination = "max_evaluations";
            break;
        }

        auto pick = [&] {
            const std::size_t i = rng.uniform_index(archive.size());
            const std::size_t j = rng.uniform_index(archive.size());
            return next_fit[j] < next_fit[i] ? j : i;
        };
        genes.clear();
        while (genes.size() < cfg.population) {
            const std::size_t a = pick();
            const std::size_t b = pick();
            auto [c1, c2] = make_children(archive[a].genotype, archive[b].genotype, cfg.crossover_prob, pm, rng);
            genes.push_back(std::move(c1));
            if (genes.size() < cfg.population)
                genes.push_back(std::move(c2));
        }
        population = evaluate_all(cache, genes);
    }

    for (std::size_t i : non_dominated_indices(objectives_of(archive)))
        result.front.push_back(archive[i]);
    result.unique_evals = cache.unique_evaluations();
    return result;
}

} // namespace floodopt

#endif
