#ifndef FLOODOPT_TESTS_SUPPORT_HPP
#define FLOODOPT_TESTS_SUPPORT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "floodopt.hpp"

namespace fotest {

inline std::string data_path(const std::string& rel) { return std::string(FLOODOPT_TEST_DATA) + "/" + rel; }

/// The 12-zone surrogate tabulated once through the real evaluator, so repeated runs can
/// use a lookup instead of recomputing exposure.
struct Oracle {
    floodopt::LoadedConfig config;
    std::size_t length = 0;
    std::vector<floodopt::ObjectiveVector> table; // indexed by genotype number, first bit most significant
    std::vector<floodopt::ObjectiveVector> exact; // distinct Pareto-optimal vectors
};

inline std::uint64_t genotype_number(const floodopt::BitString& g)
{
    std::uint64_t i = 0;
    for (std::size_t k = 0; k < g.size(); ++k)
        i = (i << 1) | g[k];
    return i;
}

inline const Oracle& surrogate12()
{
    static const Oracle oracle = [] {
        Oracle o;
        o.config = floodopt::load_config(data_path("surrogate12/config.json"));
        o.length = o.config.problem.layout.total_length();
        floodopt::FitnessCache cache(floodopt::make_objective(o.config.problem));
        const auto ex = floodopt::exhaustive_search(cache, o.length, o.config.exhaustive_cap);
        for (const auto& x : ex.all)
            o.table.push_back(x.objectives);
        o.exact = floodopt::pareto_front(o.table);
        return o;
    }();
    return oracle;
}

inline floodopt::ObjectiveFunction lookup(const Oracle& o)
{
    return [&o](const floodopt::BitString& g) { return o.table.at(genotype_number(g)); };
}

struct Trace {
    std::vector<floodopt::GenerationRecord> records;
    floodopt::RunResult result;
};

/// Hyper-area ratio of the last record logged within `budget` unique evaluations.
inline std::optional<double> ratio_at(const Trace& t, std::size_t budget, const std::vector<floodopt::ObjectiveVector>& exact)
{
    const floodopt::GenerationRecord* last = nullptr;
    for (const auto& r : t.records)
        if (r.unique_evals <= budget)
            last = &r;
    if (!last)
        return std::nullopt;
    return floodopt::normalized_hyper_area_ratio(last->front, exact);
}

inline Trace run_epsilon(const Oracle& o, floodopt::RunConfig cfg)
{
    floodopt::FitnessCache cache(floodopt::make_objective(o.config.problem));
    Trace t;
    t.result = floodopt::run_epsilon_moea(cache, o.config.problem.layout, cfg,
                                          [&t](const floodopt::GenerationRecord& r) { t.records.push_back(r); });
    return t;
}

inline Trace run_baseline(const Oracle& o, const std::string& algo, floodopt::BaselineConfig cfg)
{
    floodopt::FitnessCache cache(floodopt::make_objective(o.config.problem));
    Trace t;
    auto sink = [&t](const floodopt::GenerationRecord& r) { t.records.push_back(r); };
    t.result = algo == "nsga2" ? floodopt::run_nsga2(cache, o.length, cfg, sink)
                               : floodopt::run_spea2(cache, o.length, cfg, sink);
    return t;
}

} // namespace fotest

#endif
