#ifndef FLOODOPT_PARETO_HPP
#define FLOODOPT_PARETO_HPP

#include <algorithm>
#include <array>
#include <cstddef>
#include <numeric>
#include <vector>

namespace floodopt {

/// (f1, f2): implementation whole-life cost and flood-risk metric, both minimized.
using ObjectiveVector = std::array<double, 2>;

/// Pareto dominance for minimization.
inline bool dominates(const ObjectiveVector& z, const ObjectiveVector& w)
{
    bool strict = false;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (z[i] > w[i])
            return false;
        if (z[i] < w[i])
            strict = true;
    }
    return strict;
}

/// Indices of the members not dominated by any other member. Duplicated vectors all survive.
inline std::vector<std::size_t> non_dominated_indices(const std::vector<ObjectiveVector>& points)
{
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return points[a] != points[b] ? points[a] < points[b] : a < b;
    });
    // Sweep in (f1, f2) order: a point survives if its f2 beats everything earlier with smaller f1.
    std::vector<std::size_t> keep;
    double best_f2 = 0.0;
    bool have = false;
    for (std::size_t k = 0; k < order.size();) {
        std::size_t j = k;
        while (j < order.size() && points[order[j]][0] == points[order[k]][0])
            ++j;
        const double group_min = points[order[k]][1];
        for (std::size_t q = k; q < j; ++q) {
            const auto& p = points[order[q]];
            if (p[1] == group_min && (!have || p[1] < best_f2))
                keep.push_back(order[q]);
        }
        if (!have || group_min < best_f2) {
            best_f2 = group_min;
            have = true;
        }
        k = j;
    }
    std::sort(keep.begin(), keep.end());
    return keep;
}

/// Exact Pareto set: non-dominated members with duplicates collapsed, sorted by f1.
inline std::vector<ObjectiveVector> pareto_front(const std::vector<ObjectiveVector>& points)
{
    std::vector<ObjectiveVector> out;
    for (auto i : non_dominated_indices(points))
        out.push_back(points[i]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace floodopt

#endif
