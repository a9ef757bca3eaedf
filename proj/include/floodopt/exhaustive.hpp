#ifndef FLOODOPT_EXHAUSTIVE_HPP
#define FLOODOPT_EXHAUSTIVE_HPP

// Exhaustive enumeration of a small genotype space and its exact Pareto set.

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"
#include "floodopt/evaluator.hpp"
#include "floodopt/pareto.hpp"
#include "floodopt/run_log.hpp"
#include "floodopt/search.hpp"

namespace floodopt {

/// Genotype number `index` of a length-L space; bit 0 of the string is the most significant.
inline BitString genotype_at(std::uint64_t index, std::size_t length)
{
    BitString g(length);
    for (std::size_t k = 0; k < length; ++k)
        g.set(k, ((index >> (length - 1 - k)) & 1U) != 0);
    return g;
}

struct ExhaustiveResult {
    std::vector<Individual> all;       // enumeration order
    std::vector<Individual> pareto_set; // every genotype whose vector is non-dominated
};

inline ExhaustiveResult exhaustive_search(FitnessCache& cache, std::size_t length, std::uint64_t cap,
                                          std::size_t batch = 4096)
{
    if (length >= 64 || (std::uint64_t{1} << length) > cap)
        throw InputError("search space of 2^" + std::to_string(length) + " genotypes exceeds the exhaustive cap of " +
                         std::to_string(cap) + "; raise it with --cap");
    const std::uint64_t n = std::uint64_t{1} << length;
    ExhaustiveResult r;
    r.all.reserve(n);
    std::vector<BitString> genes;
    for (std::uint64_t i = 0; i < n; ++i) {
        genes.push_back(genotype_at(i, length));
        if (genes.size() == batch || i + 1 == n) {
            auto xs = evaluate_all(cache, genes);
            r.all.insert(r.all.end(), xs.begin(), xs.end());
            genes.clear();
        }
    }
    for (std::size_t i : non_dominated_indices(objectives_of(r.all)))
        r.pareto_set.push_back(r.all[i]);
    r.pareto_set = sorted_front(std::move(r.pareto_set));
    return r;
}

inline std::string individuals_csv(const std::vector<Individual>& xs)
{
    std::string s = "genotype,f1,f2\n";
    for (const auto& x : xs)
        s += objectives_csv_row(x.genotype.to_string(), x.objectives);
    return s;
}

/// Reads a genotype,f1,f2 table (front.csv, pareto.csv, all.csv).
inline std::vector<Individual> parse_individuals_csv(const std::string& text, const std::string& origin)
{
    std::istringstream in(text);
    std::string line;
    std::vector<Individual> out;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || (lineno == 1 && line.rfind("genotype", 0) == 0))
            continue;
        const auto a = line.find(',');
        const auto b = a == std::string::npos ? a : line.find(',', a + 1);
        if (b == std::string::npos)
            throw InputError(origin + ":" + std::to_string(lineno) + ": expected genotype,f1,f2");
        try {
            std::size_t used1 = 0, used2 = 0;
            const std::string s1 = line.substr(a + 1, b - a - 1), s2 = line.substr(b + 1);
            const double f1 = std::stod(s1, &used1), f2 = std::stod(s2, &used2);
            if (used1 != s1.size() || used2 != s2.size())
                throw std::invalid_argument("trailing text");
            out.push_back({BitString::from_string(line.substr(0, a)), {f1, f2}});
        } catch (const std::exception& e) {
            throw InputError(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

} // namespace floodopt

#endif
