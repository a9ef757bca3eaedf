#ifndef FLOODOPT_EXPOSURE_HPP
#define FLOODOPT_EXPOSURE_HPP

// Building flood-exposure analysis: buffer-zone depths around each footprint,
// Low/Medium/High classification, and the two risk metrics.

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "floodopt/errors.hpp"
#include "floodopt/geometry.hpp"
#include "floodopt/raster.hpp"

namespace floodopt {

enum class UseClass { Residential, Commercial };

inline std::string to_string(UseClass u) { return u == UseClass::Residential ? "residential" : "commercial"; }

inline UseClass use_class_from_string(const std::string& s)
{
    if (s == "residential")
        return UseClass::Residential;
    if (s == "commercial")
        return UseClass::Commercial;
    throw InputError("unknown use class '" + s + "' (expected residential or commercial)");
}

struct Building {
    std::string id;
    Ring footprint;
    UseClass use_class = UseClass::Residential;
    int buffer_cells_k = 1;
};

/// Cells whose square overlaps the footprint with positive area, in unbounded index space.
inline std::vector<Cell> footprint_cells(const Ring& footprint, const GridFrame& frame)
{
    std::vector<Cell> out;
    const Ring ring = open_ring(footprint);
    if (ring.size() < 3)
        return out;
    const Box bb = bounding_box(ring);
    const Cell nw = frame.locate({bb.x0, bb.y1});
    const Cell se = frame.locate({bb.x1, bb.y0});
    const double min_area = 1e-9 * frame.cellsize * frame.cellsize;
    for (auto r = nw.row; r <= se.row; ++r)
        for (auto c = nw.col; c <= se.col; ++c)
            if (overlap_area(ring, frame.cell_box({r, c})) > min_area)
                out.push_back({r, c});
    return out;
}

/// Ring of cells within Chebyshev distance k of the footprint, footprint cells excluded,
/// clipped to the grid. Empty when no footprint cell lies inside the grid.
inline std::vector<Cell> buffer_cells(const Building& b, const GridFrame& frame, int k)
{
    if (k < 1)
        throw InputError("buffer extent must be at least one cell (building '" + b.id + "')");
    const auto fp = footprint_cells(b.footprint, frame);
    const bool any_inside = std::any_of(fp.begin(), fp.end(), [&](const Cell& c) { return frame.contains(c); });
    if (!any_inside)
        return {};
    std::vector<Cell> sorted_fp = fp;
    std::sort(sorted_fp.begin(), sorted_fp.end());
    std::vector<Cell> out;
    for (const auto& f : fp)
        for (int dr = -k; dr <= k; ++dr)
            for (int dc = -k; dc <= k; ++dc) {
                const Cell c{f.row + dr, f.col + dc};
                if (!frame.contains(c) || std::binary_search(sorted_fp.begin(), sorted_fp.end(), c))
                    continue;
                out.push_back(c);
            }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

enum class ExposureClass { Low, MediumI, MediumII, High };

inline std::string to_string(ExposureClass c)
{
    switch (c) {
    case ExposureClass::Low: return "low";
    case ExposureClass::MediumI: return "medium_i";
    case ExposureClass::MediumII: return "medium_ii";
    case ExposureClass::High: return "high";
    }
    return "?";
}

struct ExposureThresholds {
    double mean = 0.10; // m
    double p90 = 0.30;  // m
};

/// Table lookup on (mean, 90th percentile) buffer depth. The (mean >= 0.30, p90 < 0.30)
/// corner is not listed in the source table and maps to MediumII since p90 rules out High.
inline ExposureClass classify_exposure(double mean_depth, double p90_depth, ExposureThresholds t = {})
{
    if (!(mean_depth >= 0.0) || !(p90_depth >= 0.0))
        throw InputError("exposure depths must be non-negative");
    const bool deep_p90 = p90_depth >= t.p90;
    if (mean_depth < t.mean)
        return deep_p90 ? ExposureClass::MediumI : ExposureClass::Low;
    return deep_p90 ? ExposureClass::High : ExposureClass::MediumII;
}

/// Nearest-rank percentile: the value at 1-based rank ceil(p/100 * n) in ascending order.
inline double nearest_rank_percentile(std::vector<double> values, unsigned percent)
{
    if (values.empty())
        throw InputError("percentile of an empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    std::size_t rank = (percent * n + 99) / 100;
    rank = std::clamp<std::size_t>(rank, 1, n);
    return values[rank - 1];
}

inline double percentile_90(std::span<const double> depths)
{
    return nearest_rank_percentile(std::vector<double>(depths.begin(), depths.end()), 90);
}

/// Piecewise-linear depth (m) to damage (GBP) curve, clamped at both ends.
class DamageCurve {
public:
    DamageCurve() = default;
    explicit DamageCurve(std::vector<std::pair<double, double>> points) : points_(std::move(points))
    {
        if (points_.empty())
            throw InputError("damage curve needs at least one point");
        for (std::size_t i = 1; i < points_.size(); ++i) {
            if (!(points_[i].first > points_[i - 1].first))
                throw InputError("damage curve depths must be strictly increasing");
            if (points_[i].second < points_[i - 1].second)
                throw InputError("damage curve must be non-decreasing in depth");
        }
    }

    double operator()(double depth) const
    {
        if (points_.empty())
            throw InputError("damage curve is empty");
        if (depth <= points_.front().first)
            return points_.front().second;
        if (depth >= points_.back().first)
            return points_.back().second;
        auto hi = std::upper_bound(points_.begin(), points_.end(), depth,
                                   [](double d, const auto& p) { return d < p.first; });
        auto lo = hi - 1;
        const double t = (depth - lo->first) / (hi->first - lo->first);
        return lo->second + t * (hi->second - lo->second);
    }

    const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

private:
    std::vector<std::pair<double, double>> points_;
};

enum class RiskMetric { HighCount, ExpectedDamages };

struct BuildingExposure {
    double mean_depth = 0.0;
    double p90_depth = 0.0;
    std::size_t cells = 0;
    ExposureClass exposure = ExposureClass::Low;
};

/// Precomputed buffer zones for a fixed grid frame and building set.
class ExposureModel {
public:
    ExposureModel() = default;
    ExposureModel(GridFrame frame, std::vector<Building> buildings, RiskMetric metric,
                  std::map<UseClass, DamageCurve> curves, ExposureThresholds thresholds = {})
        : frame_(frame), buildings_(std::move(buildings)), metric_(metric), curves_(std::move(curves)),
          thresholds_(thresholds)
    {
        buffers_.reserve(buildings_.size());
        for (const auto& b : buildings_) {
            std::vector<std::size_t> idx;
            for (const auto& c : buffer_cells(b, frame_, b.buffer_cells_k))
                idx.push_back(frame_.index(c));
            if (idx.empty())
                outside_.push_back(b.id);
            buffers_.push_back(std::move(idx));
        }
        if (metric_ == RiskMetric::ExpectedDamages)
            for (const auto& b : buildings_)
                if (!curves_.count(b.use_class))
                    throw InputError("no damage curve configured for use class '" + to_string(b.use_class) + "'");
    }

    const GridFrame& frame() const noexcept { return frame_; }
    const std::vector<Building>& buildings() const noexcept { return buildings_; }
    const std::vector<std::string>& buildings_outside_grid() const noexcept { return outside_; }
    RiskMetric metric() const noexcept { return metric_; }

    std::vector<BuildingExposure> analyse(const Raster& grid) const
    {
        if (!(grid.frame == frame_))
            throw InputError("depth grid frame does not match the problem frame");
        std::vector<BuildingExposure> out(buildings_.size());
        std::vector<double> depths;
        for (std::size_t b = 0; b < buildings_.size(); ++b) {
            depths.clear();
            for (auto i : buffers_[b]) {
                const double d = grid.values[i];
                if (!grid.is_nodata(d))
                    depths.push_back(d);
            }
            auto& e = out[b];
            e.cells = depths.size();
            if (depths.empty())
                continue; // excluded from the analysis, counted as Low
            double sum = 0.0;
            for (double d : depths)
                sum += d;
            e.mean_depth = sum / static_cast<double>(depths.size());
            e.p90_depth = percentile_90(depths);
            e.exposure = classify_exposure(e.mean_depth, e.p90_depth, thresholds_);
        }
        return out;
    }

    double risk(const Raster& grid) const { return risk_from(analyse(grid)); }

    double risk_from(const std::vector<BuildingExposure>& exposures) const
    {
        double total = 0.0;
        for (std::size_t b = 0; b < exposures.size(); ++b) {
            if (exposures[b].exposure != ExposureClass::High)
                continue;
            if (metric_ == RiskMetric::HighCount)
                total += 1.0;
            else
                total += curves_.at(buildings_[b].use_class)(exposures[b].mean_depth);
        }
        return total;
    }

private:
    GridFrame frame_;
    std::vector<Building> buildings_;
    std::vector<std::vector<std::size_t>> buffers_;
    std::vector<std::string> outside_;
    RiskMetric metric_ = RiskMetric::HighCount;
    std::map<UseClass, DamageCurve> curves_;
    ExposureThresholds thresholds_;
};

inline double risk_metric(const Raster& grid, const std::vector<Building>& buildings, RiskMetric metric,
                          const std::map<UseClass, DamageCurve>& curves = {}, ExposureThresholds thresholds = {})
{
    return ExposureModel(grid.frame, buildings, metric, curves, thresholds).risk(grid);
}

} // namespace floodopt

#endif
