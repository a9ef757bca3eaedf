#ifndef FLOODOPT_RUN_LOG_HPP
#define FLOODOPT_RUN_LOG_HPP

// Run directory layout:
//   manifest.json        digests, seed, algorithm, parameters, termination
//   generations.jsonl    one record per generation
//   evaluations.csv      unique-evaluation ledger
//   front.csv            final front, sorted by (f1, f2, genotype)
//   phenotypes.json      decoded front members with per-feature costs

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"
#include "floodopt/evaluator.hpp"
#include "floodopt/problem.hpp"
#include "floodopt/search.hpp"
#include "floodopt/util.hpp"

#ifndef FLOODOPT_VERSION
#define FLOODOPT_VERSION "0.0.0"
#endif

namespace floodopt {

inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json pair_json(const ObjectiveVector& z) { return nlohmann::json::array({z[0], z[1]}); }

inline nlohmann::json record_to_json(const GenerationRecord& r)
{
    nlohmann::json front = nlohmann::json::array();
    for (const auto& z : r.front)
        front.push_back(pair_json(z));
    return {{"algorithm", r.algorithm},
            {"t", r.t},
            {"population", r.population},
            {"archive_size", r.archive_size},
            {"unique_evals", r.unique_evals},
            {"epsilon", pair_json(r.epsilon)},
            {"z_min_vec", pair_json(r.z_min_vec)},
            {"z_max_vec", pair_json(r.z_max_vec)},
            {"hv", r.hv},
            {"front", front}};
}

inline GenerationRecord record_from_json(const nlohmann::json& j)
{
    GenerationRecord r;
    try {
        auto vec = [](const nlohmann::json& a) { return ObjectiveVector{a.at(0).get<double>(), a.at(1).get<double>()}; };
        r.algorithm = j.at("algorithm").get<std::string>();
        r.t = j.at("t").get<std::size_t>();
        r.population = j.at("population").get<std::size_t>();
        r.archive_size = j.at("archive_size").get<std::size_t>();
        r.unique_evals = j.at("unique_evals").get<std::size_t>();
        r.epsilon = vec(j.at("epsilon"));
        r.z_min_vec = vec(j.at("z_min_vec"));
        r.z_max_vec = vec(j.at("z_max_vec"));
        r.hv = j.at("hv").get<double>();
        for (const auto& z : j.at("front"))
            r.front.push_back(vec(z));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed generation record: ") + e.what());
    }
    return r;
}

inline std::string objectives_csv_row(const std::string& genotype, const ObjectiveVector& z)
{
    return genotype + "," + format_number(z[0]) + "," + format_number(z[1]) + "\n";
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    out << text;
    if (!out)
        throw InputError("failed writing '" + path.string() + "'");
}

inline std::string ledger_csv(const std::vector<LedgerEntry>& ledger)
{
    std::string s = "sequence,genotype,f1,f2\n";
    for (const auto& e : ledger)
        s += std::to_string(e.sequence) + "," + objectives_csv_row(e.genotype.to_string(), e.objectives);
    return s;
}

inline std::vector<Individual> sorted_front(std::vector<Individual> front)
{
    std::sort(front.begin(), front.end(), [](const Individual& a, const Individual& b) {
        if (a.objectives != b.objectives)
            return a.objectives < b.objectives;
        return a.genotype < b.genotype;
    });
    return front;
}

inline std::string front_csv(const std::vector<Individual>& front)
{
    std::string s = "genotype,f1,f2\n";
    for (const auto& x : sorted_front(front))
        s += objectives_csv_row(x.genotype.to_string(), x.objectives);
    return s;
}

inline nlohmann::json phenotype_json(const BitString& g, const ProblemDefinition& problem)
{
    const auto p = decode_genotype(g, problem.layout);
    const auto costs = cost_breakdown(p, problem);
    const auto& specs = problem.layout.features();
    nlohmann::json features = nlohmann::json::array();
    for (std::size_t f = 0; f < specs.size(); ++f) {
        const auto& spec = problem.interventions[f];
        nlohmann::json j{{"id", spec.id},
                         {"kind", to_string(spec.kind)},
                         {"active", feature_active(spec, specs[f], p.features[f])},
                         {"cost", costs[f]}};
        if (specs[f].style == FeatureStyle::Local)
            for (std::size_t c = 0; c < specs[f].characteristics.size(); ++c)
                j[specs[f].characteristics[c].name] = p.features[f].values[c];
        features.push_back(std::move(j));
    }
    return {{"genotype", g.to_string()}, {"features", features}};
}

struct ManifestInfo {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::string config_path;
    std::string config_digest;
    std::string problem_digest;
    nlohmann::json parameters = nlohmann::json::object();
};

/// Streams generation records as they arrive so that an aborted run leaves its partial log behind.
class RunWriter {
public:
    RunWriter(std::filesystem::path dir, ManifestInfo info) : dir_(std::move(dir)), info_(std::move(info))
    {
        std::filesystem::create_directories(dir_);
        log_.open(dir_ / "generations.jsonl", std::ios::binary | std::ios::trunc);
        if (!log_)
            throw InputError("cannot write run log in '" + dir_.string() + "'");
        started_ = utc_timestamp();
    }

    void record(const GenerationRecord& r)
    {
        log_ << record_to_json(r).dump() << '\n';
        log_.flush();
    }

    RecordSink sink()
    {
        return [this](const GenerationRecord& r) { record(r); };
    }

    /// Writes the ledger and, when a result is given, the front files; always writes the manifest.
    void finish(const FitnessCache& cache, const ProblemDefinition* problem, const RunResult* result,
                const std::string& termination)
    {
        log_.flush();
        write_text(dir_ / "evaluations.csv", ledger_csv(cache.ledger()));
        nlohmann::json manifest{{"tool_version", FLOODOPT_VERSION},
                                {"algorithm", info_.algorithm},
                                {"seed", info_.seed},
                                {"config", info_.config_path},
                                {"config_digest", info_.config_digest},
                                {"problem_digest", info_.problem_digest},
                                {"parameters", info_.parameters},
                                {"started", started_},
                                {"finished", utc_timestamp()},
                                {"termination", termination},
                                {"unique_evals", cache.unique_evaluations()}};
        if (result) {
            manifest["generations"] = result->generations;
            manifest["front_size"] = result->front.size();
            write_text(dir_ / "front.csv", front_csv(result->front));
            if (problem) {
                nlohmann::json ph = nlohmann::json::array();
                for (const auto& x : sorted_front(result->front))
                    ph.push_back(phenotype_json(x.genotype, *problem));
                write_text(dir_ / "phenotypes.json", ph.dump(2) + "\n");
            }
        }
        write_text(dir_ / "manifest.json", manifest.dump(2) + "\n");
    }

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
    ManifestInfo info_;
    std::ofstream log_;
    std::string started_;
};

} // namespace floodopt

#endif
