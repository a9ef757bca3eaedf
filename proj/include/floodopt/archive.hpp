#ifndef FLOODOPT_ARCHIVE_HPP
#define FLOODOPT_ARCHIVE_HPP

// Epsilon-box archive for two minimized objectives.
//
// Bounds are kept as the two boundary vectors z_min_vec = [f1_min, f2_max]
// and z_max_vec = [f1_max, f2_min]; boxes are measured from (f1_min, f2_min).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"
#include "floodopt/pareto.hpp"
#include "floodopt/rng.hpp"

namespace floodopt {

using BoxIndex = std::array<std::int64_t, 2>;

inline bool box_dominates(const BoxIndex& a, const BoxIndex& b)
{
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i])
            return false;
        if (a[i] < b[i])
            strict = true;
    }
    return strict;
}

/// Additive epsilon-dominance: z_i - eps_i <= w_i on every objective.
inline bool epsilon_dominates(const ObjectiveVector& z, const ObjectiveVector& w, const ObjectiveVector& eps)
{
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] - eps[i] > w[i])
            return false;
    return true;
}

struct ArchiveEntry {
    BitString genotype;
    ObjectiveVector objectives{};
    BoxIndex box{};
};

struct UpdateOutcome {
    bool accepted = false;
    std::size_t displaced = 0;
};

class EpsilonArchive {
public:
    static constexpr double tol = 1e-12;

    EpsilonArchive() = default;

    /// Adaptive archive bounded by the 'do minimum' and 'do maximum' objective vectors.
    EpsilonArchive(std::size_t max_front, const ObjectiveVector& z_min_vec, const ObjectiveVector& z_max_vec,
                   Rng* rng = nullptr)
        : max_front_(max_front), z_min_(z_min_vec), z_max_(z_max_vec), rng_(rng), bounded_(true)
    {
        if (max_front_ == 0)
            throw InputError("maximum front size must be positive");
        eps_ = epsilon_for(z_min_, z_max_);
    }

    /// Fixed grid with explicit widths and per-objective minima; no adaptation or clamping.
    static EpsilonArchive fixed(const ObjectiveVector& epsilon, const ObjectiveVector& minima, Rng* rng = nullptr)
    {
        for (double e : epsilon)
            if (!(e > 0.0))
                throw DegenerateRangeError("box width must be positive");
        EpsilonArchive a;
        a.eps_ = epsilon;
        a.z_min_ = {minima[0], std::numeric_limits<double>::infinity()};
        a.z_max_ = {std::numeric_limits<double>::infinity(), minima[1]};
        a.rng_ = rng;
        a.bounded_ = false;
        return a;
    }

    void set_rng(Rng* rng) noexcept { rng_ = rng; }

    const std::vector<ArchiveEntry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t max_front() const noexcept { return max_front_; }
    const ObjectiveVector& epsilon() const noexcept { return eps_; }
    const ObjectiveVector& z_min_vec() const noexcept { return z_min_; }
    const ObjectiveVector& z_max_vec() const noexcept { return z_max_; }
    ObjectiveVector lower() const { return {z_min_[0], z_max_[1]}; }
    ObjectiveVector upper() const { return {z_max_[0], z_min_[1]}; }

    std::vector<ObjectiveVector> objectives() const
    {
        std::vector<ObjectiveVector> out;
        for (const auto& e : entries_)
            out.push_back(e.objectives);
        return out;
    }

    BoxIndex box_index(const ObjectiveVector& z) const { return box_under(z, z_min_, z_max_); }

    bool box_dominates(const ObjectiveVector& z, const ObjectiveVector& w) const
    {
        return floodopt::box_dominates(box_index(z), box_index(w));
    }

    /// True keeps the archived vector: smaller distance from the box origin wins, exact ties
    /// are settled by the seeded stream.
    bool tie_break(const ObjectiveVector& archived, const ObjectiveVector& candidate)
    {
        const double da = origin_distance(archived);
        const double dc = origin_distance(candidate);
        if (da < dc)
            return true;
        if (dc < da)
            return false;
        return rng_ ? rng_->coin() : true;
    }

    UpdateOutcome update(const BitString& genotype, const ObjectiveVector& z)
    {
        for (const auto& e : entries_)
            if (e.genotype == genotype)
                return {};
        const BoxIndex b = box_index(z);
        std::vector<std::size_t> doomed;
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            const auto& e = entries_[k];
            if (floodopt::box_dominates(b, e.box)) {
                doomed.push_back(k);
            } else if (floodopt::box_dominates(e.box, b)) {
                return {};
            } else if (b == e.box) {
                if (dominates(z, e.objectives))
                    doomed.push_back(k);
                else if (dominates(e.objectives, z) || tie_break(e.objectives, z))
                    return {};
                else
                    doomed.push_back(k);
            }
        }
        erase_indices(doomed);
        entries_.push_back({genotype, z, b});
        return {true, doomed.size()};
    }

    /// Boundary adaptation and epsilon recalculation. Returns true when the grid moved,
    /// in which case prune() must follow.
    bool update_epsilon()
    {
        if (!bounded_ || entries_.empty())
            return false;
        ObjectiveVector zmin = z_min_, zmax = z_max_;
        for (const auto& e : entries_) {
            const auto& z = e.objectives;
            if (floodopt::box_dominates(box_under(z, zmin, zmax), box_under(zmin, zmin, zmax)))
                zmin = {zmin[0], z[1] + tol};
            const BoxIndex bz = box_under(z, zmin, zmax);
            if (dominates(z, zmax))
                zmax = {z[0] + tol, z[1] - tol};
            else if (floodopt::box_dominates(bz, box_under(zmax, zmin, zmax)))
                zmax = {zmax[0], z[1] - tol};
            else if (z[0] > zmax[0] || z[1] < zmax[1])
                zmax = {std::max(z[0] + tol, zmax[0]), std::min(z[1] - tol, zmax[1])};
        }
        const ObjectiveVector new_eps = epsilon_for(zmin, zmax);
        const bool moved = zmin != z_min_ || zmax != z_max_ || new_eps != eps_;
        z_min_ = zmin;
        z_max_ = zmax;
        eps_ = new_eps;
        return moved;
    }

    /// Re-map, drop box-dominated members, then settle shared boxes. Returns the number removed.
    std::size_t prune()
    {
        for (auto& e : entries_)
            e.box = box_index(e.objectives);
        std::vector<std::size_t> doomed;
        for (std::size_t i = 0; i < entries_.size(); ++i)
            for (std::size_t j = 0; j < entries_.size(); ++j)
                if (i != j && floodopt::box_dominates(entries_[j].box, entries_[i].box)) {
                    doomed.push_back(i);
                    break;
                }
        const std::size_t before = entries_.size();
        erase_indices(doomed);
        std::vector<ArchiveEntry> kept;
        for (auto& e : entries_) {
            auto it = std::find_if(kept.begin(), kept.end(), [&](const ArchiveEntry& k) { return k.box == e.box; });
            if (it == kept.end()) {
                kept.push_back(std::move(e));
                continue;
            }
            if (dominates(e.objectives, it->objectives))
                *it = std::move(e);
            else if (!dominates(it->objectives, e.objectives) && !tie_break(it->objectives, e.objectives))
                *it = std::move(e);
        }
        entries_ = std::move(kept);
        return before - entries_.size();
    }

    /// Empty string when every structural invariant holds, otherwise a description of the first breach.
    std::string check_invariants() const
    {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].box != box_index(entries_[i].objectives))
                return "stale box index for entry " + std::to_string(i);
            for (std::size_t j = 0; j < entries_.size(); ++j) {
                if (i == j)
                    continue;
                if (entries_[i].box == entries_[j].box)
                    return "entries " + std::to_string(i) + " and " + std::to_string(j) + " share a box";
                if (floodopt::box_dominates(entries_[i].box, entries_[j].box))
                    return "entry " + std::to_string(i) + " box-dominates entry " + std::to_string(j);
            }
        }
        if (bounded_ && entries_.size() > max_front_)
            return "archive holds " + std::to_string(entries_.size()) + " entries, bound is " +
                   std::to_string(max_front_);
        return {};
    }

private:
    ObjectiveVector epsilon_for(const ObjectiveVector& zmin, const ObjectiveVector& zmax) const
    {
        const double n = static_cast<double>(max_front_);
        return {std::max((zmax[0] - zmin[0]) / n, tol), std::max((zmin[1] - zmax[1]) / n, tol)};
    }

    /// A vector sitting exactly on the upper bound would open an extra box column past
    /// the N-th; it is folded into the last box so the grid has exactly N columns.
    BoxIndex box_under(const ObjectiveVector& z, const ObjectiveVector& zmin, const ObjectiveVector& zmax) const
    {
        const ObjectiveVector lo{zmin[0], zmax[1]};
        const ObjectiveVector hi{zmax[0], zmin[1]};
        BoxIndex b{};
        for (std::size_t i = 0; i < b.size(); ++i) {
            b[i] = static_cast<std::int64_t>(std::floor((z[i] - lo[i]) / eps_[i]));
            if (bounded_ && b[i] >= static_cast<std::int64_t>(max_front_) && z[i] <= hi[i])
                b[i] = static_cast<std::int64_t>(max_front_) - 1;
        }
        return b;
    }

    double origin_distance(const ObjectiveVector& z) const
    {
        const auto lo = lower();
        double s = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            const double u = z[i] - lo[i];
            const double d = u - std::floor(u / eps_[i]) * eps_[i];
            s += d * d;
        }
        return std::sqrt(s);
    }

    void erase_indices(const std::vector<std::size_t>& idx)
    {
        if (idx.empty())
            return;
        std::vector<ArchiveEntry> rest;
        rest.reserve(entries_.size() - idx.size());
        std::size_t p = 0;
        for (std::size_t k = 0; k < entries_.size(); ++k) {
            if (p < idx.size() && idx[p] == k) {
                ++p;
                continue;
            }
            rest.push_back(std::move(entries_[k]));
        }
        entries_ = std::move(rest);
    }

    std::size_t max_front_ = 0;
    ObjectiveVector z_min_{};
    ObjectiveVector z_max_{};
    ObjectiveVector eps_{1.0, 1.0};
    Rng* rng_ = nullptr;
    bool bounded_ = false;
    std::vector<ArchiveEntry> entries_;
};

} // namespace floodopt

#endif
