#ifndef FLOODOPT_EVALUATOR_HPP
#define FLOODOPT_EVALUATOR_HPP

// Memoized fitness evaluation with a unique-evaluation ledger. Batches run in
// parallel; results enter the cache and ledger in first-appearance order so
// the ledger never depends on thread scheduling.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"
#include "floodopt/exposure.hpp"
#include "floodopt/external_evaluator.hpp"
#include "floodopt/pareto.hpp"
#include "floodopt/problem.hpp"

namespace floodopt {

using ObjectiveFunction = std::function<ObjectiveVector(const BitString&)>;

struct LedgerEntry {
    std::size_t sequence = 0;
    BitString genotype;
    ObjectiveVector objectives{};
};

class FitnessCache {
public:
    explicit FitnessCache(ObjectiveFunction fn, unsigned workers = 1) : fn_(std::move(fn)), workers_(std::max(1u, workers))
    {
    }

    ObjectiveVector evaluate(const BitString& g) { return evaluate_batch({g}).front(); }

    std::vector<ObjectiveVector> evaluate_batch(const std::vector<BitString>& batch)
    {
        std::vector<BitString> fresh;
        {
            std::lock_guard lock(mutex_);
            std::map<BitString, bool> pending;
            for (const auto& g : batch)
                if (!cache_.count(g) && !pending.count(g)) {
                    pending.emplace(g, true);
                    fresh.push_back(g);
                }
        }
        std::vector<ObjectiveVector> results(fresh.size());
        run_parallel(fresh, results);
        std::lock_guard lock(mutex_);
        for (std::size_t k = 0; k < fresh.size(); ++k) {
            if (cache_.emplace(fresh[k], results[k]).second)
                ledger_.push_back({ledger_.size() + 1, fresh[k], results[k]});
        }
        std::vector<ObjectiveVector> out;
        out.reserve(batch.size());
        for (const auto& g : batch)
            out.push_back(cache_.at(g));
        return out;
    }

    bool contains(const BitString& g) const
    {
        std::lock_guard lock(mutex_);
        return cache_.count(g) > 0;
    }
    std::size_t unique_evaluations() const
    {
        std::lock_guard lock(mutex_);
        return ledger_.size();
    }
    const std::vector<LedgerEntry>& ledger() const noexcept { return ledger_; }
    void set_workers(unsigned w) { workers_ = std::max(1u, w); }

private:
    void run_parallel(const std::vector<BitString>& jobs, std::vector<ObjectiveVector>& results)
    {
        const unsigned n = std::min<unsigned>(workers_, static_cast<unsigned>(jobs.size()));
        if (n <= 1) {
            for (std::size_t k = 0; k < jobs.size(); ++k)
                results[k] = fn_(jobs[k]);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(jobs.size());
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t)
            pool.emplace_back([&] {
                for (std::size_t k; (k = next.fetch_add(1)) < jobs.size();) {
                    try {
                        results[k] = fn_(jobs[k]);
                    } catch (...) {
                        errors[k] = std::current_exception();
                    }
                }
            });
        for (auto& th : pool)
            th.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    ObjectiveFunction fn_;
    unsigned workers_;
    mutable std::mutex mutex_;
    std::map<BitString, ObjectiveVector> cache_;
    std::vector<LedgerEntry> ledger_;
};

struct ScenarioEvaluation {
    Phenotype phenotype;
    std::vector<double> costs;
    std::vector<BuildingExposure> exposures;
    ObjectiveVector objectives{};
};

inline Raster flood_depths(const BitString& g, const Phenotype& p, const ProblemDefinition& problem)
{
    if (problem.evaluator.type == EvaluatorBinding::Type::External)
        return external_evaluate(g, p, problem);
    return surrogate_evaluate(p, problem);
}

/// Risk of the configured baseline grid; only defined when one is supplied.
inline double baseline_risk(const ProblemDefinition& problem)
{
    if (!problem.baseline_depth)
        throw ConfigError("no baseline depth grid configured");
    return problem.exposure.risk(*problem.baseline_depth);
}

inline ScenarioEvaluation evaluate_scenario(const BitString& g, const ProblemDefinition& problem)
{
    ScenarioEvaluation ev;
    ev.phenotype = decode_genotype(g, problem.layout);
    ev.costs = cost_breakdown(ev.phenotype, problem);
    const Raster depth = flood_depths(g, ev.phenotype, problem);
    ev.exposures = problem.exposure.analyse(depth);
    double cost = 0.0;
    for (double c : ev.costs)
        cost += c;
    ev.objectives = {cost, problem.exposure.risk_from(ev.exposures)};
    return ev;
}

/// Objective function for the optimisers. With the surrogate, every result is checked
/// against the baseline risk since no intervention may raise exposure.
inline ObjectiveFunction make_objective(const ProblemDefinition& problem)
{
    const bool surrogate = problem.evaluator.type == EvaluatorBinding::Type::Surrogate;
    const double base = surrogate ? baseline_risk(problem) : 0.0;
    return [&problem, surrogate, base](const BitString& g) {
        const auto z = evaluate_scenario(g, problem).objectives;
        if (!std::isfinite(z[0]) || !std::isfinite(z[1]) || z[0] < 0.0 || z[1] < 0.0)
            throw EvaluationError("non-finite or negative objective for genotype " + g.to_string());
        if (surrogate && z[1] > base)
            throw EvaluationError("genotype " + g.to_string() + " raises the risk metric above the baseline");
        return z;
    };
}

} // namespace floodopt

#endif
