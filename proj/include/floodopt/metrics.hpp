#ifndef FLOODOPT_METRICS_HPP
#define FLOODOPT_METRICS_HPP

// Two-objective hypervolume (S-metric), hyper-area ratio and normalization.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "floodopt/errors.hpp"
#include "floodopt/pareto.hpp"

namespace floodopt {

/// Points paired with a reference vector. Points beyond the reference on any
/// component are dropped here; points on the reference are kept and add no area.
class FrontApproximation {
public:
    FrontApproximation(const std::vector<ObjectiveVector>& points, ObjectiveVector reference) : reference_(reference)
    {
        for (const auto& p : points) {
            if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
                throw InputError("non-finite point in front approximation");
            if (p[0] <= reference_[0] && p[1] <= reference_[1])
                points_.push_back(p);
        }
    }

    const std::vector<ObjectiveVector>& points() const noexcept { return points_; }
    const ObjectiveVector& reference() const noexcept { return reference_; }

private:
    std::vector<ObjectiveVector> points_;
    ObjectiveVector reference_;
};

/// Area of the union of boxes [p, ref], by a sweep over f1.
inline double hypervolume_2d(const FrontApproximation& front)
{
    auto pts = front.points();
    std::sort(pts.begin(), pts.end());
    const auto& ref = front.reference();
    double area = 0.0;
    double level = ref[1];
    for (const auto& p : pts)
        if (p[1] < level) {
            area += (ref[0] - p[0]) * (level - p[1]);
            level = p[1];
        }
    return area;
}

inline double hypervolume_2d(const std::vector<ObjectiveVector>& points, ObjectiveVector reference)
{
    return hypervolume_2d(FrontApproximation(points, reference));
}

inline double hyper_area_ratio(const FrontApproximation& approx, const FrontApproximation& exact)
{
    if (approx.reference() != exact.reference())
        throw InputError("hyper-area ratio needs a shared reference vector");
    const double denom = hypervolume_2d(exact);
    if (!(denom > 0.0))
        throw DegenerateRangeError("hyper-area ratio is undefined for an exact front with zero hypervolume");
    return hypervolume_2d(approx) / denom;
}

inline constexpr double normalized_clamp = 1.25;

/// Affine map of each component onto [0, 1] over [lower, upper], clamped to [0, 1.25].
inline std::vector<ObjectiveVector> normalize(const std::vector<ObjectiveVector>& points, const ObjectiveVector& lower,
                                              const ObjectiveVector& upper)
{
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(upper[i] > lower[i]))
            throw DegenerateRangeError("normalization bounds have zero or negative range on objective " +
                                       std::to_string(i + 1));
    std::vector<ObjectiveVector> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        ObjectiveVector q{};
        for (std::size_t i = 0; i < p.size(); ++i)
            q[i] = std::clamp((p[i] - lower[i]) / (upper[i] - lower[i]), 0.0, normalized_clamp);
        out.push_back(q);
    }
    return out;
}

/// Hypervolume in the space normalized by [lower, upper] with reference (1.25, 1.25).
inline double normalized_hypervolume(const std::vector<ObjectiveVector>& points, const ObjectiveVector& lower,
                                     const ObjectiveVector& upper)
{
    return hypervolume_2d(normalize(points, lower, upper), {normalized_clamp, normalized_clamp});
}

/// Hyper-area ratio of an approximation against the exact Pareto set, both normalized by the
/// exact set's ideal and nadir vectors.
inline double normalized_hyper_area_ratio(const std::vector<ObjectiveVector>& approx,
                                          const std::vector<ObjectiveVector>& exact)
{
    if (exact.empty())
        throw DegenerateRangeError("exact front is empty");
    ObjectiveVector ideal = exact.front(), nadir = exact.front();
    for (const auto& p : exact)
        for (std::size_t i = 0; i < p.size(); ++i) {
            ideal[i] = std::min(ideal[i], p[i]);
            nadir[i] = std::max(nadir[i], p[i]);
        }
    const ObjectiveVector ref{normalized_clamp, normalized_clamp};
    return hyper_area_ratio(FrontApproximation(normalize(approx, ideal, nadir), ref),
                            FrontApproximation(normalize(exact, ideal, nadir), ref));
}

} // namespace floodopt

#endif
