#ifndef FLOODOPT_MOEA_HPP
#define FLOODOPT_MOEA_HPP

// Epsilon-MOEA driver with extreme-vector seeding, adaptive epsilon, adaptive
// population sizing and hypervolume self-termination.
//
// Draw order on the run's single stream:
//   initialize      L coin flips per random genotype, population order
//   each offspring  tournament draws i and j, archive draw, [crossover uniform if
//                   crossover_prob < 1], cut, then L mutation uniforms
//   archive update  one coin per exact tie-break, in candidate order
//   resize          one SUS offset, then L coin flips per random fill genotype
// Evaluation parallelism never touches the stream.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "floodopt/archive.hpp"
#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"
#include "floodopt/evaluator.hpp"
#include "floodopt/metrics.hpp"
#include "floodopt/rng.hpp"
#include "floodopt/search.hpp"
#include "floodopt/spea2.hpp"

namespace floodopt {

struct RunConfig {
    std::size_t max_front = 36;
    double delta_p = 0.1;
    double injection_rate = 0.25;
    std::size_t lag_window = 10;
    std::size_t max_generations = 500;
    std::uint64_t seed = 0;
    double mutation_prob = -1.0; // negative = 1/L
    double crossover_prob = 1.0;
    bool adaptation_enabled = true;
    bool population_sizing = true;
    std::size_t initial_population = 5;
    std::size_t max_evaluations = 0; // 0 = unlimited

    void validate() const
    {
        if (max_front == 0)
            throw ConfigError("max_front must be positive");
        if (!(delta_p > 0.0 && delta_p < 1.0))
            throw ConfigError("delta_p must lie in (0, 1)");
        if (!(injection_rate > 0.0 && injection_rate <= 1.0))
            throw ConfigError("injection_rate must lie in (0, 1]");
        if (lag_window == 0)
            throw ConfigError("lag_window must be at least 1");
        if (initial_population == 0)
            throw ConfigError("initial population must be positive");
        if (crossover_prob < 0.0 || crossover_prob > 1.0)
            throw ConfigError("crossover probability must lie in [0, 1]");
        if (mutation_prob > 1.0)
            throw ConfigError("mutation probability must not exceed 1");
    }
};

class EpsilonMoea {
public:
    EpsilonMoea(FitnessCache& cache, std::size_t length, RunConfig cfg, BitString do_minimum, BitString do_maximum)
        : cache_(cache), length_(length), cfg_(cfg), rng_(cfg.seed), x_min_(std::move(do_minimum)),
          x_max_(std::move(do_maximum))
    {
        cfg_.validate();
        if (x_min_.size() != length_ || x_max_.size() != length_)
            throw InputError("extreme genotypes do not match the genotype length");
        pm_ = cfg_.mutation_prob < 0.0 ? default_mutation_prob(length_) : cfg_.mutation_prob;
    }

    EpsilonMoea(const EpsilonMoea&) = delete;
    EpsilonMoea& operator=(const EpsilonMoea&) = delete;

    void set_sink(RecordSink sink) { sink_ = std::move(sink); }

    void initialize()
    {
        const auto seeds = cache_.evaluate_batch({x_min_, x_max_});
        archive_ = EpsilonArchive(cfg_.max_front, seeds[0], seeds[1], &rng_);
        archive_.update(x_min_, seeds[0]);
        archive_.update(x_max_, seeds[1]);
        std::vector<BitString> genes;
        for (std::size_t n = 0; n < cfg_.initial_population; ++n)
            genes.push_back(random_genotype(length_, rng_));
        population_ = evaluate_all(cache_, genes);
        for (const auto& x : population_)
            archive_.update(x.genotype, x.objectives);
        if (cfg_.adaptation_enabled && archive_.update_epsilon())
            archive_.prune();
        t_ = 0;
        prev_archive_size_ = archive_.size();
        hv_history_.assign(1, current_hv());
        emit();
    }

    /// SPEA-2 fitness over population and archive together; population members come first.
    Spea2Fitness selection_fitness() const
    {
        auto pts = objectives_of(population_);
        for (const auto& e : archive_.entries())
            pts.push_back(e.objectives);
        return spea2_fitness(pts, population_.size(), archive_.size());
    }

    std::vector<BitString> generate_offspring()
    {
        if (population_.empty() || archive_.empty())
            throw InputError("offspring generation needs a population and an archive");
        const auto fit = selection_fitness();
        std::vector<BitString> out;
        out.reserve(population_.size());
        for (std::size_t n = 0; n < population_.size(); ++n) {
            const std::size_t i = rng_.uniform_index(population_.size());
            const std::size_t j = rng_.uniform_index(population_.size());
            std::size_t a = i;
            if (fit.fitness[j] < fit.fitness[i] || (fit.fitness[j] == fit.fitness[i] && fit.sigma[j] > fit.sigma[i]))
                a = j;
            const std::size_t b = rng_.uniform_index(archive_.size());
            out.push_back(make_child(population_[a].genotype, archive_.entries()[b].genotype, cfg_.crossover_prob, pm_,
                                     rng_));
        }
        return out;
    }

    void step_generation()
    {
        prev_archive_size_ = archive_.size();
        population_ = evaluate_all(cache_, generate_offspring());
        displaced_ = 0;
        for (const auto& x : population_)
            displaced_ += archive_.update(x.genotype, x.objectives).displaced;
        if (cfg_.adaptation_enabled && archive_.update_epsilon())
            archive_.prune();
        ++t_;
        hv_history_.push_back(current_hv());
        emit();
    }

    /// True when the run should stop; `termination()` names the reason.
    bool self_termination_check()
    {
        const std::size_t w = cfg_.lag_window;
        if (t_ >= w && t_ % w == 0) {
            const double box = 1.0 / (static_cast<double>(cfg_.max_front) * static_cast<double>(cfg_.max_front));
            if (std::abs(hv_history_[t_] - hv_history_[t_ - w]) < box) {
                termination_ = "hypervolume";
                return true;
            }
        }
        if (t_ >= cfg_.max_generations) {
            termination_ = "max_generations";
            return true;
        }
        if (cfg_.max_evaluations > 0 && cache_.unique_evaluations() >= cfg_.max_evaluations) {
            termination_ = "max_evaluations";
            return true;
        }
        return false;
    }

    void intra_run_check()
    {
        if (resized_last_) {
            resized_last_ = false;
            return;
        }
        if (prev_archive_size_ == 0)
            return;
        const double prev = static_cast<double>(prev_archive_size_);
        const double growth = std::abs(static_cast<double>(archive_.size()) - prev) / prev;
        if (!(growth < cfg_.delta_p))
            return;
        if (!(static_cast<double>(displaced_) / prev < cfg_.delta_p))
            return;
        const std::size_t n = population_.size();
        const auto cap = static_cast<std::size_t>(std::floor(static_cast<double>(archive_.size()) / cfg_.injection_rate));
        const std::size_t n_new = std::min(2 * n, cap);
        if (n_new == n || n_new == 0)
            return;
        const auto n_inj = static_cast<std::size_t>(std::floor(cfg_.injection_rate * static_cast<double>(archive_.size())));
        std::vector<Individual> next;
        const auto& entries = archive_.entries();
        for (std::size_t k : sus_select(entries.size(), std::min(n_inj, n_new), rng_))
            next.push_back({entries[k].genotype, entries[k].objectives});
        if (next.size() < n_new) {
            std::vector<BitString> genes;
            while (next.size() + genes.size() < n_new)
                genes.push_back(random_genotype(length_, rng_));
            for (auto& x : evaluate_all(cache_, genes)) {
                archive_.update(x.genotype, x.objectives);
                next.push_back(std::move(x));
            }
            if (cfg_.adaptation_enabled && archive_.update_epsilon())
                archive_.prune();
        }
        population_ = std::move(next);
        resized_last_ = true;
        ++resizes_;
    }

    RunResult run()
    {
        initialize();
        if (!self_termination_check())
            for (;;) {
                step_generation();
                if (self_termination_check())
                    break;
                if (cfg_.population_sizing)
                    intra_run_check();
            }
        RunResult r;
        for (const auto& e : archive_.entries())
            r.front.push_back({e.genotype, e.objectives});
        r.termination = termination_;
        r.generations = t_;
        r.unique_evals = cache_.unique_evaluations();
        return r;
    }

    std::size_t generation() const noexcept { return t_; }
    const std::vector<Individual>& population() const noexcept { return population_; }
    const EpsilonArchive& archive() const noexcept { return archive_; }
    const std::vector<double>& hv_history() const noexcept { return hv_history_; }
    std::size_t displaced() const noexcept { return displaced_; }
    std::size_t resizes() const noexcept { return resizes_; }
    const std::string& termination() const noexcept { return termination_; }
    double mutation_prob() const noexcept { return pm_; }
    Rng& rng() noexcept { return rng_; }

    /// Test seam: replace the working population.
    void set_population(std::vector<Individual> p) { population_ = std::move(p); }
    /// Test seam: pretend the previous generation ended with this archive size and replacement count.
    void set_history(std::size_t prev_archive_size, std::size_t displaced, bool resized_last = false)
    {
        prev_archive_size_ = prev_archive_size;
        displaced_ = displaced;
        resized_last_ = resized_last;
    }

private:
    double current_hv() const
    {
        return safe_normalized_hypervolume(archive_.objectives(), archive_.lower(), archive_.upper());
    }

    void emit() const
    {
        if (!sink_)
            return;
        GenerationRecord rec;
        rec.algorithm = "epsilon";
        rec.t = t_;
        rec.population = population_.size();
        rec.archive_size = archive_.size();
        rec.unique_evals = cache_.unique_evaluations();
        rec.epsilon = archive_.epsilon();
        rec.z_min_vec = archive_.z_min_vec();
        rec.z_max_vec = archive_.z_max_vec();
        rec.hv = hv_history_.back();
        rec.front = archive_.objectives();
        sink_(rec);
    }

    FitnessCache& cache_;
    std::size_t length_;
    RunConfig cfg_;
    Rng rng_;
    BitString x_min_;
    BitString x_max_;
    double pm_ = 0.0;
    EpsilonArchive archive_;
    std::vector<Individual> population_;
    std::vector<double> hv_history_;
    std::size_t t_ = 0;
    std::size_t prev_archive_size_ = 0;
    std::size_t displaced_ = 0;
    bool resized_last_ = false;
    std::size_t resizes_ = 0;
    std::string termination_;
    RecordSink sink_;
};

/// Convenience wrapper seeding from a layout's extreme genotypes.
inline RunResult run_epsilon_moea(FitnessCache& cache, const GenotypeLayout& layout, const RunConfig& cfg,
                                  const RecordSink& sink = {})
{
    auto [lo, hi] = build_extreme_genotypes(layout);
    EpsilonMoea m(cache, layout.total_length(), cfg, std::move(lo), std::move(hi));
    m.set_sink(sink);
    return m.run();
}

} // namespace floodopt

#endif
