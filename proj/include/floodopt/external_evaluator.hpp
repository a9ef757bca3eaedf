#ifndef FLOODOPT_EXTERNAL_EVALUATOR_HPP
#define FLOODOPT_EXTERNAL_EVALUATOR_HPP

// Protocol seam for a real flood model. Each call gets a fresh working
// directory holding scenario.json and dem.asc; the command is run as
// `<cmd> <workdir>` and must leave depth.asc behind.

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"
#include "floodopt/problem.hpp"
#include "floodopt/raster.hpp"

extern char** environ;

namespace floodopt {

struct CommandResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string output; // combined stdout and stderr
};

/// Runs `/bin/sh -c '<command> "$1"' sh <arg>` with output captured to a log file.
inline CommandResult run_command(const std::string& command, const std::string& arg, const std::string& log_path,
                                 double timeout_s)
{
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);
    posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
    posix_spawnattr_setpgroup(&attr, 0);

    const std::string script = command + " \"$1\"";
    std::vector<std::string> args{"/bin/sh", "-c", script, "sh", arg};
    std::vector<char*> argv;
    for (auto& a : args)
        argv.push_back(a.data());
    argv.push_back(nullptr);

    pid_t pid = 0;
    const int rc = posix_spawn(&pid, "/bin/sh", &actions, &attr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);
    if (rc != 0)
        throw EvaluationError("failed to start evaluator command: " + std::string(std::strerror(rc)));

    CommandResult res;
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    int status = 0;
    auto pause = std::chrono::milliseconds(1);
    for (;;) {
        const pid_t w = waitpid(pid, &status, WNOHANG);
        if (w == pid)
            break;
        if (w < 0)
            throw EvaluationError("waiting for evaluator command failed");
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(-pid, SIGKILL);
            waitpid(pid, &status, 0);
            res.timed_out = true;
            break;
        }
        std::this_thread::sleep_for(pause);
        pause = std::min(pause * 2, std::chrono::milliseconds(50));
    }
    if (!res.timed_out)
        res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
    std::ifstream log(log_path, std::ios::binary);
    res.output.assign(std::istreambuf_iterator<char>(log), std::istreambuf_iterator<char>());
    return res;
}

inline nlohmann::json scenario_document(const BitString& genotype, const Phenotype& p, const ProblemDefinition& problem)
{
    const auto costs = cost_breakdown(p, problem);
    nlohmann::json features = nlohmann::json::array();
    double total = 0.0;
    const auto& specs = problem.layout.features();
    for (std::size_t f = 0; f < specs.size(); ++f) {
        const auto& spec = problem.interventions[f];
        nlohmann::json j;
        j["id"] = spec.id;
        j["kind"] = to_string(spec.kind);
        j["active"] = feature_active(spec, specs[f], p.features[f]);
        j["cost"] = costs[f];
        if (specs[f].style == FeatureStyle::Local) {
            nlohmann::json values;
            for (std::size_t c = 0; c < specs[f].characteristics.size(); ++c)
                values[specs[f].characteristics[c].name] = p.features[f].values[c];
            j["values"] = values;
        }
        if (spec.kind == InterventionKind::DetentionBasin) {
            const auto g = basin_geometry(spec, specs[f], p.features[f]);
            j["centre"] = {g.centre.x, g.centre.y};
            j["radius"] = g.radius();
        } else {
            j["area"] = spec.area;
            nlohmann::json cells = nlohmann::json::array();
            for (const auto& c : spec.cells)
                cells.push_back({c.row, c.col});
            j["cells"] = cells;
        }
        if (!spec.infiltration.empty())
            j["infiltration"] = spec.infiltration;
        total += costs[f];
        features.push_back(std::move(j));
    }
    return {{"genotype", genotype.to_string()}, {"features", features}, {"total_cost", total}};
}

/// DEM with every active basin carved in layout order.
inline Raster carved_dem(const Phenotype& p, const ProblemDefinition& problem)
{
    if (!problem.dem)
        throw ConfigError("no DEM configured");
    Raster dem = *problem.dem;
    const auto& specs = problem.layout.features();
    for (std::size_t f = 0; f < specs.size(); ++f) {
        const auto& spec = problem.interventions[f];
        if (spec.kind != InterventionKind::DetentionBasin || !feature_active(spec, specs[f], p.features[f]))
            continue;
        dem = carve_basin(dem, basin_geometry(spec, specs[f], p.features[f]), problem.exclusion_mask).dem;
    }
    return dem;
}

inline Raster external_evaluate(const BitString& genotype, const Phenotype& p, const ProblemDefinition& problem,
                                bool keep_workdir = false)
{
    namespace fs = std::filesystem;
    const auto& ev = problem.evaluator;
    if (ev.command.empty())
        throw ConfigError("external evaluator command is empty");
    fs::path root = ev.workdir_root.empty() ? fs::temp_directory_path() : fs::path(ev.workdir_root);
    fs::create_directories(root);
    std::string tmpl = (root / "floodopt-eval-XXXXXX").string();
    if (!mkdtemp(tmpl.data()))
        throw EvaluationError("cannot create evaluator working directory under " + root.string());
    const fs::path dir(tmpl);

    {
        std::ofstream out(dir / "scenario.json");
        out << scenario_document(genotype, p, problem).dump(2) << '\n';
    }
    write_ascii_grid(carved_dem(p, problem), (dir / "dem.asc").string());

    const auto res = run_command(ev.command, dir.string(), (dir / "evaluator.log").string(), ev.timeout_s);
    auto fail = [&](const std::string& what) -> EvaluationError {
        std::string tail = res.output.size() > 2000 ? res.output.substr(res.output.size() - 2000) : res.output;
        return EvaluationError(what + " (workdir " + dir.string() + ")" + (tail.empty() ? "" : ": " + tail));
    };
    if (res.timed_out)
        throw fail("evaluator timed out after " + std::to_string(ev.timeout_s) + " s");
    if (res.exit_code != 0)
        throw fail("evaluator exited with status " + std::to_string(res.exit_code));
    Raster depth;
    try {
        depth = read_ascii_grid((dir / "depth.asc").string());
    } catch (const InputError& e) {
        throw fail(std::string("malformed depth grid: ") + e.what());
    }
    if (!(depth.frame == problem.exposure.frame()))
        throw fail("frame mismatch between depth.asc and the problem grid");
    if (!keep_workdir) {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    return depth;
}

} // namespace floodopt

#endif
