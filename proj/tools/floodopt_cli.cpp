// floodopt command-line front end.
//
// Exit codes: 0 ok, 1 input error, 2 validation failure, 3 runtime failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "floodopt.hpp"

namespace fs = std::filesystem;
using namespace floodopt;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_validation = 2;
constexpr int exit_runtime = 3;

struct ValidationFailed {
};

void print_report(const ValidationReport& rep, std::ostream& os)
{
    for (const auto& v : rep.violations) {
        os << (v.hard ? "error" : "warning");
        if (v.guideline > 0)
            os << " [guideline " << v.guideline << "]";
        if (!v.feature.empty())
            os << " " << v.feature;
        os << ": " << v.message << "\n";
    }
    for (const auto& n : rep.notes)
        os << "note: " << n << "\n";
}

LoadedConfig load_checked(const std::string& path)
{
    auto cfg = load_config(path);
    const auto rep = validate_problem(cfg.problem);
    if (!rep.ok()) {
        print_report(rep, std::cerr);
        throw ValidationFailed{};
    }
    return cfg;
}

int cmd_validate(const std::string& path)
{
    const auto cfg = load_config(path);
    const auto rep = validate_problem(cfg.problem);
    print_report(rep, std::cout);
    std::cout << cfg.problem.layout.feature_count() << " features, " << cfg.problem.layout.total_length()
              << " bits, " << cfg.problem.exposure.buildings().size() << " buildings\n";
    std::cout << (rep.ok() ? "valid" : "invalid") << "\n";
    return rep.ok() ? exit_ok : exit_validation;
}

struct RunOptions {
    std::string config;
    std::string algo = "epsilon";
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_front, pop, tend, max_evals;
    std::optional<unsigned> workers;
    std::string out;
};

int cmd_run(const RunOptions& o)
{
    auto cfg = load_checked(o.config);
    RunConfig rc = cfg.run;
    BaselineConfig bc = cfg.baseline;
    rc.seed = bc.seed = o.seed;
    if (o.max_front)
        rc.max_front = *o.max_front;
    if (o.pop)
        bc.population = bc.archive_size = *o.pop;
    if (o.tend)
        rc.max_generations = bc.max_generations = *o.tend;
    if (o.max_evals)
        rc.max_evaluations = bc.max_evaluations = *o.max_evals;
    rc.validate();
    bc.validate();
    if (o.algo == "nsga2" && bc.population % 2 != 0)
        throw ConfigError("NSGA-II needs an even population size, got " + std::to_string(bc.population));

    const unsigned workers = effective_workers(o.workers.value_or(cfg.workers));
    FitnessCache cache(make_objective(cfg.problem), workers);

    ManifestInfo info;
    info.algorithm = o.algo;
    info.seed = o.seed;
    info.config_path = fs::absolute(o.config).lexically_normal().string();
    info.config_digest = cfg.config_digest;
    info.problem_digest = cfg.problem_digest;
    if (o.algo == "epsilon")
        info.parameters = {{"max_front", rc.max_front},       {"delta_p", rc.delta_p},
                           {"injection_rate", rc.injection_rate}, {"lag_window", rc.lag_window},
                           {"max_generations", rc.max_generations}, {"max_evaluations", rc.max_evaluations},
                           {"adaptation", rc.adaptation_enabled},  {"population_sizing", rc.population_sizing}};
    else
        info.parameters = {{"population", bc.population},
                           {"archive_size", bc.archive_size},
                           {"max_generations", bc.max_generations},
                           {"max_evaluations", bc.max_evaluations}};
    const fs::path out = o.out.empty() ? fs::path("runs") / (o.algo + "-seed" + std::to_string(o.seed)) : fs::path(o.out);
    RunWriter writer(out, info);

    const std::size_t length = cfg.problem.layout.total_length();
    RunResult result;
    try {
        if (o.algo == "epsilon")
            result = run_epsilon_moea(cache, cfg.problem.layout, rc, writer.sink());
        else if (o.algo == "nsga2")
            result = run_nsga2(cache, length, bc, writer.sink());
        else
            result = run_spea2(cache, length, bc, writer.sink());
    } catch (const std::exception& e) {
        writer.finish(cache, nullptr, nullptr, std::string("aborted: ") + e.what());
        throw;
    }
    writer.finish(cache, &cfg.problem, &result, result.termination);
    std::cout << o.algo << " seed " << o.seed << ": " << result.front.size() << " solutions after "
              << result.generations << " generations, " << result.unique_evals << " unique evaluations ("
              << result.termination << ")\n"
              << "outputs in " << out.string() << "\n";
    return exit_ok;
}

int cmd_exhaustive(const std::string& config, std::optional<std::uint64_t> cap, const std::string& out_dir,
                   std::optional<unsigned> workers)
{
    auto cfg = load_checked(config);
    const std::uint64_t limit = cap.value_or(cfg.exhaustive_cap);
    const std::size_t length = cfg.problem.layout.total_length();
    if (length >= 64 || (std::uint64_t{1} << length) > limit)
        throw InputError("search space of 2^" + std::to_string(length) + " genotypes exceeds the exhaustive cap of " +
                         std::to_string(limit) + "; raise it with --cap");
    FitnessCache cache(make_objective(cfg.problem), effective_workers(workers.value_or(cfg.workers)));
    const auto res = exhaustive_search(cache, length, limit);
    const fs::path out = out_dir.empty() ? fs::path("exhaustive") : fs::path(out_dir);
    fs::create_directories(out);
    write_text(out / "all.csv", individuals_csv(res.all));
    write_text(out / "pareto.csv", individuals_csv(res.pareto_set));
    std::cout << res.all.size() << " genotypes evaluated, " << res.pareto_set.size() << " in the Pareto set, "
              << pareto_front(objectives_of(res.pareto_set)).size() << " distinct front vectors\n"
              << "outputs in " << out.string() << "\n";
    return exit_ok;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& exact_path, const std::string& out_path)
{
    std::vector<RunTrace> runs;
    for (const auto& d : dirs)
        runs.push_back(load_run(d));
    std::optional<std::vector<ObjectiveVector>> exact;
    if (!exact_path.empty())
        exact = pareto_front(objectives_of(parse_individuals_csv(read_text_file(exact_path), exact_path)));
    const auto text = format_report(runs, exact ? &*exact : nullptr);
    if (out_path.empty())
        std::cout << text;
    else
        write_text(out_path, text);
    return exit_ok;
}

int cmd_evaluate(const std::string& config, const std::string& bits)
{
    auto cfg = load_checked(config);
    const BitString g = BitString::from_string(bits);
    if (g.size() != cfg.problem.layout.total_length())
        throw InputError("genotype has " + std::to_string(g.size()) + " bits, the layout needs " +
                         std::to_string(cfg.problem.layout.total_length()));
    const auto ev = evaluate_scenario(g, cfg.problem);
    nlohmann::json out = phenotype_json(g, cfg.problem);
    nlohmann::json buildings = nlohmann::json::array();
    const auto& bs = cfg.problem.exposure.buildings();
    for (std::size_t b = 0; b < bs.size(); ++b)
        buildings.push_back({{"id", bs[b].id},
                             {"use_class", to_string(bs[b].use_class)},
                             {"mean_depth", ev.exposures[b].mean_depth},
                             {"p90_depth", ev.exposures[b].p90_depth},
                             {"cells", ev.exposures[b].cells},
                             {"exposure", to_string(ev.exposures[b].exposure)}});
    out["buildings"] = buildings;
    out["objectives"] = {{"cost", ev.objectives[0]}, {"risk", ev.objectives[1]}};
    if (cfg.problem.baseline_depth)
        out["baseline_risk"] = baseline_risk(cfg.problem);
    std::cout << out.dump(2) << "\n";
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Blue-green infrastructure placement optimiser"};
    app.set_version_flag("--version", std::string(FLOODOPT_VERSION));
    app.require_subcommand(1);

    std::string config;
    auto* validate = app.add_subcommand("validate", "Check a problem configuration");
    validate->add_option("config", config, "Configuration file")->required();

    RunOptions ro;
    std::size_t max_front = 0, pop = 0, tend = 0, max_evals = 0;
    unsigned workers = 0;
    auto* run = app.add_subcommand("run", "Run an optimiser");
    run->add_option("config", ro.config, "Configuration file")->required();
    run->add_option("--algo", ro.algo, "Algorithm")->check(CLI::IsMember({"epsilon", "nsga2", "spea2"}));
    run->add_option("--seed", ro.seed, "Random seed")->required();
    auto* o_front = run->add_option("--max-front", max_front, "Maximum front size (epsilon)");
    auto* o_pop = run->add_option("--pop", pop, "Population size (nsga2, spea2)");
    auto* o_tend = run->add_option("--tend", tend, "Maximum generations");
    auto* o_evals = run->add_option("--max-evals", max_evals, "Unique evaluation budget");
    auto* o_workers = run->add_option("--workers", workers, "Parallel evaluations");
    run->add_option("--out", ro.out, "Output directory");

    std::uint64_t cap = 0;
    std::string ex_out;
    unsigned ex_workers = 0;
    auto* exhaustive = app.add_subcommand("exhaustive", "Evaluate every genotype and write the exact Pareto set");
    exhaustive->add_option("config", config, "Configuration file")->required();
    auto* o_cap = exhaustive->add_option("--cap", cap, "Largest search space to enumerate");
    exhaustive->add_option("--out", ex_out, "Output directory");
    auto* o_ex_workers = exhaustive->add_option("--workers", ex_workers, "Parallel evaluations");

    std::vector<std::string> dirs;
    std::string exact, report_out;
    auto* report = app.add_subcommand("report", "Compare run directories");
    report->add_option("dirs", dirs, "Run directories")->required();
    report->add_option("--exact", exact, "Exact Pareto set (pareto.csv) for hyper-area ratios");
    report->add_option("--out", report_out, "Write the report to a file");

    std::string bits;
    auto* evaluate = app.add_subcommand("evaluate", "Decode and evaluate one genotype");
    evaluate->add_option("config", config, "Configuration file")->required();
    evaluate->add_option("--genotype", bits, "Bit string")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_input;
    }

    try {
        if (*validate)
            return cmd_validate(config);
        if (*run) {
            if (*o_front)
                ro.max_front = max_front;
            if (*o_pop)
                ro.pop = pop;
            if (*o_tend)
                ro.tend = tend;
            if (*o_evals)
                ro.max_evals = max_evals;
            if (*o_workers)
                ro.workers = workers;
            return cmd_run(ro);
        }
        if (*exhaustive)
            return cmd_exhaustive(config, *o_cap ? std::optional<std::uint64_t>(cap) : std::nullopt, ex_out,
                                  *o_ex_workers ? std::optional<unsigned>(ex_workers) : std::nullopt);
        if (*report)
            return cmd_report(dirs, exact, report_out);
        if (*evaluate)
            return cmd_evaluate(config, bits);
    } catch (const ValidationFailed&) {
        std::cerr << "configuration failed validation\n";
        return exit_validation;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    } catch (const std::exception& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return exit_runtime;
    }
    return exit_input;
}
