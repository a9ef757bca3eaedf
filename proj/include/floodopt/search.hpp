#ifndef FLOODOPT_SEARCH_HPP
#define FLOODOPT_SEARCH_HPP

// Pieces shared by the three optimisers: individuals, per-generation records,
// variation, and the running objective extents used to normalise baseline traces.

#include <algorithm>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"
#include "floodopt/evaluator.hpp"
#include "floodopt/metrics.hpp"
#include "floodopt/pareto.hpp"
#include "floodopt/rng.hpp"

namespace floodopt {

struct Individual {
    BitString genotype;
    ObjectiveVector objectives{};
};

struct GenerationRecord {
    std::string algorithm;
    std::size_t t = 0;
    std::size_t population = 0;
    std::size_t archive_size = 0;
    std::size_t unique_evals = 0;
    ObjectiveVector epsilon{};
    ObjectiveVector z_min_vec{};
    ObjectiveVector z_max_vec{};
    double hv = 0.0;
    std::vector<ObjectiveVector> front;
};

using RecordSink = std::function<void(const GenerationRecord&)>;

struct RunResult {
    std::vector<Individual> front;
    std::string termination;
    std::size_t generations = 0;
    std::size_t unique_evals = 0;
};

inline double default_mutation_prob(std::size_t length)
{
    return length == 0 ? 0.0 : 1.0 / static_cast<double>(length);
}

/// Draw order: one uniform if crossover_prob < 1, the cut, then one uniform per bit.
inline BitString make_child(const BitString& a, const BitString& b, double crossover_prob, double mutation_prob,
                            Rng& rng)
{
    BitString child = a;
    const bool cross = crossover_prob >= 1.0 || rng.bernoulli(crossover_prob);
    if (cross)
        child = splice(a, b, crossover_cut(a.size(), rng));
    bitflip_mutation(child, mutation_prob, rng);
    return child;
}

/// Two children from one cut: a|b and b|a, mutated in that order.
inline std::pair<BitString, BitString> make_children(const BitString& a, const BitString& b, double crossover_prob,
                                                     double mutation_prob, Rng& rng)
{
    BitString c1 = a, c2 = b;
    const bool cross = crossover_prob >= 1.0 || rng.bernoulli(crossover_prob);
    if (cross) {
        const std::size_t cut = crossover_cut(a.size(), rng);
        c1 = splice(a, b, cut);
        c2 = splice(b, a, cut);
    }
    bitflip_mutation(c1, mutation_prob, rng);
    bitflip_mutation(c2, mutation_prob, rng);
    return {std::move(c1), std::move(c2)};
}

inline std::vector<Individual> evaluate_all(FitnessCache& cache, const std::vector<BitString>& genotypes)
{
    const auto z = cache.evaluate_batch(genotypes);
    std::vector<Individual> out;
    out.reserve(genotypes.size());
    for (std::size_t k = 0; k < genotypes.size(); ++k)
        out.push_back({genotypes[k], z[k]});
    return out;
}

inline std::vector<ObjectiveVector> objectives_of(const std::vector<Individual>& xs)
{
    std::vector<ObjectiveVector> out;
    out.reserve(xs.size());
    for (const auto& x : xs)
        out.push_back(x.objectives);
    return out;
}

/// Componentwise extents of every objective vector in a cache ledger, updated incrementally.
class LedgerExtents {
public:
    void update(const FitnessCache& cache)
    {
        const auto& ledger = cache.ledger();
        for (; seen_ < ledger.size(); ++seen_)
            for (std::size_t i = 0; i < 2; ++i) {
                lower_[i] = std::min(lower_[i], ledger[seen_].objectives[i]);
                upper_[i] = std::max(upper_[i], ledger[seen_].objectives[i]);
            }
    }
    const ObjectiveVector& lower() const noexcept { return lower_; }
    const ObjectiveVector& upper() const noexcept { return upper_; }

private:
    std::size_t seen_ = 0;
    ObjectiveVector lower_{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    ObjectiveVector upper_{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
};

/// Normalised hypervolume that reports 0 instead of failing on a collapsed range.
inline double safe_normalized_hypervolume(const std::vector<ObjectiveVector>& points, const ObjectiveVector& lower,
                                          const ObjectiveVector& upper)
{
    try {
        return normalized_hypervolume(points, lower, upper);
    } catch (const DegenerateRangeError&) {
        return 0.0;
    }
}

} // namespace floodopt

#endif
