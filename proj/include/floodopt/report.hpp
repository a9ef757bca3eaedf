#ifndef FLOODOPT_REPORT_HPP
#define FLOODOPT_REPORT_HPP

// Cross-run aggregation: convergence curves on the unique-evaluation axis and
// coverage between the final fronts of different algorithms.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "floodopt/errors.hpp"
#include "floodopt/exhaustive.hpp"
#include "floodopt/metrics.hpp"
#include "floodopt/pareto.hpp"
#include "floodopt/run_log.hpp"
#include "floodopt/util.hpp"

namespace floodopt {

struct RunTrace {
    std::filesystem::path dir;
    std::string algorithm;
    std::string problem_digest;
    std::vector<GenerationRecord> records;
    std::vector<Individual> front;
};

inline RunTrace load_run(const std::filesystem::path& dir)
{
    RunTrace run;
    run.dir = dir;
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_text_file((dir / "manifest.json").string()));
        run.algorithm = manifest.at("algorithm").get<std::string>();
        run.problem_digest = manifest.at("problem_digest").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(dir.string() + "/manifest.json: " + e.what());
    } catch (const ConfigError& e) {
        throw InputError(std::string(e.what()) + " (not a run directory?)");
    }
    std::istringstream log(read_text_file((dir / "generations.jsonl").string()));
    std::string line;
    while (std::getline(log, line))
        if (!line.empty()) {
            try {
                run.records.push_back(record_from_json(nlohmann::json::parse(line)));
            } catch (const nlohmann::json::exception& e) {
                throw InputError(dir.string() + "/generations.jsonl: " + e.what());
            }
        }
    const auto front_path = dir / "front.csv";
    if (std::filesystem::exists(front_path))
        run.front = parse_individuals_csv(read_text_file(front_path.string()), front_path.string());
    return run;
}

inline void require_same_problem(const std::vector<RunTrace>& runs)
{
    for (const auto& r : runs)
        if (r.problem_digest != runs.front().problem_digest)
            throw InputError("runs '" + runs.front().dir.string() + "' and '" + r.dir.string() +
                             "' were produced from different problems (digest " + runs.front().problem_digest +
                             " vs " + r.problem_digest + ")");
}

/// Per-record indicator: the hyper-area ratio against `exact` when given, else the logged HV.
inline double record_value(const GenerationRecord& r, const std::vector<ObjectiveVector>* exact)
{
    return exact ? normalized_hyper_area_ratio(r.front, *exact) : r.hv;
}

/// Value of a run at an evaluation budget: its last record with unique_evals <= budget.
inline std::optional<double> value_at(const RunTrace& run, std::size_t budget, const std::vector<ObjectiveVector>* exact)
{
    const GenerationRecord* best = nullptr;
    for (const auto& r : run.records)
        if (r.unique_evals <= budget)
            best = &r;
    if (!best)
        return std::nullopt;
    return record_value(*best, exact);
}

struct CurvePoint {
    std::string algorithm;
    std::size_t evals = 0;
    std::size_t runs = 0;
    double mean = 0.0;
    double variance = 0.0; // sample variance, 0 for a single run
};

inline std::vector<CurvePoint> convergence_curves(const std::vector<RunTrace>& runs,
                                                  const std::vector<ObjectiveVector>* exact)
{
    require_same_problem(runs);
    std::map<std::string, std::vector<const RunTrace*>> by_algo;
    for (const auto& r : runs)
        by_algo[r.algorithm].push_back(&r);
    std::vector<CurvePoint> out;
    for (const auto& [algo, group] : by_algo) {
        std::set<std::size_t> axis;
        for (const auto* r : group)
            for (const auto& rec : r->records)
                axis.insert(rec.unique_evals);
        for (std::size_t e : axis) {
            std::vector<double> vals;
            for (const auto* r : group)
                if (auto v = value_at(*r, e, exact))
                    vals.push_back(*v);
            CurvePoint p{algo, e, vals.size(), 0.0, 0.0};
            for (double v : vals)
                p.mean += v;
            p.mean /= static_cast<double>(vals.size());
            if (vals.size() > 1) {
                for (double v : vals)
                    p.variance += (v - p.mean) * (v - p.mean);
                p.variance /= static_cast<double>(vals.size() - 1);
            }
            out.push_back(p);
        }
    }
    return out;
}

/// Fraction of `b` weakly dominated by some member of `a`.
inline double coverage(const std::vector<ObjectiveVector>& a, const std::vector<ObjectiveVector>& b)
{
    if (b.empty())
        return 0.0;
    std::size_t hit = 0;
    for (const auto& q : b)
        if (std::any_of(a.begin(), a.end(), [&](const ObjectiveVector& p) { return p[0] <= q[0] && p[1] <= q[1]; }))
            ++hit;
    return static_cast<double>(hit) / static_cast<double>(b.size());
}

struct CoverageRow {
    std::string a;
    std::string b;
    double coverage = 0.0;
};

/// Union of each algorithm's final fronts, then pairwise coverage between the unions.
inline std::vector<CoverageRow> front_coverage(const std::vector<RunTrace>& runs)
{
    require_same_problem(runs);
    std::map<std::string, std::vector<ObjectiveVector>> unions;
    for (const auto& r : runs) {
        auto& u = unions[r.algorithm];
        for (const auto& x : r.front)
            u.push_back(x.objectives);
    }
    for (auto& [algo, u] : unions)
        u = pareto_front(u);
    std::vector<CoverageRow> out;
    for (const auto& [a, ua] : unions)
        for (const auto& [b, ub] : unions)
            if (a != b)
                out.push_back({a, b, coverage(ua, ub)});
    return out;
}

inline std::string format_report(const std::vector<RunTrace>& runs, const std::vector<ObjectiveVector>* exact)
{
    std::string s = exact ? "# hyper-area ratio\n" : "# normalised hypervolume\n";
    s += "algorithm,unique_evals,runs,mean,variance\n";
    for (const auto& p : convergence_curves(runs, exact))
        s += p.algorithm + "," + std::to_string(p.evals) + "," + std::to_string(p.runs) + "," + format_number(p.mean) +
             "," + format_number(p.variance) + "\n";
    const auto cov = front_coverage(runs);
    if (!cov.empty()) {
        s += "# final front coverage C(a, b)\n";
        s += "a,b,coverage\n";
        for (const auto& c : cov)
            s += c.a + "," + c.b + "," + format_number(c.coverage) + "\n";
    }
    return s;
}

} // namespace floodopt

#endif
