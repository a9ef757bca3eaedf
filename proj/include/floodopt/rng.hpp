#ifndef FLOODOPT_RNG_HPP
#define FLOODOPT_RNG_HPP

// One seeded stream per run, with hand-rolled distribution helpers that replay
// identically across standard library implementations.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"

namespace floodopt {

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n), unbiased by rejection.
    std::uint64_t uniform_index(std::uint64_t n)
    {
        if (n == 0)
            throw InputError("uniform_index over an empty range");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do
            x = next();
        while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }
    bool coin() { return (next() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

/// Stochastic universal sampling of k draws from n equally weighted items:
/// one random offset, then k evenly spaced pointers. Distinct indices whenever k <= n.
inline std::vector<std::size_t> sus_select(std::size_t n, std::size_t k, Rng& rng)
{
    std::vector<std::size_t> out;
    if (k == 0)
        return out;
    if (n == 0)
        throw InputError("stochastic universal sampling from an empty set");
    const double spacing = static_cast<double>(n) / static_cast<double>(k);
    const double start = rng.uniform01() * spacing;
    out.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        auto idx = static_cast<std::size_t>(start + static_cast<double>(j) * spacing);
        out.push_back(std::min(idx, n - 1));
    }
    return out;
}

inline BitString random_genotype(std::size_t length, Rng& rng)
{
    BitString g(length);
    for (std::size_t k = 0; k < length; ++k)
        g.set(k, rng.coin());
    return g;
}

/// Cut point in [1, L-1]; consumes no draw when L < 2.
inline std::size_t crossover_cut(std::size_t length, Rng& rng)
{
    if (length < 2)
        return length;
    return 1 + static_cast<std::size_t>(rng.uniform_index(length - 1));
}

/// Child takes a[0, cut) and b[cut, L).
inline BitString splice(const BitString& a, const BitString& b, std::size_t cut)
{
    if (a.size() != b.size())
        throw InputError("crossover parents differ in length");
    BitString child = a;
    for (std::size_t k = cut; k < b.size(); ++k)
        child.set(k, b[k]);
    return child;
}

/// Independent per-bit flips; draws exactly one uniform per bit.
inline void bitflip_mutation(BitString& g, double p, Rng& rng)
{
    for (std::size_t k = 0; k < g.size(); ++k)
        if (rng.bernoulli(p))
            g.flip(k);
}

} // namespace floodopt

#endif
