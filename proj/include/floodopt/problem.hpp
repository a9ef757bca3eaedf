#ifndef FLOODOPT_PROBLEM_HPP
#define FLOODOPT_PROBLEM_HPP

// The optimisation problem instance: interventions bound to layout features,
// cost schedules, the exposure model, terrain/depth rasters and evaluator binding.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "floodopt/cost.hpp"
#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"
#include "floodopt/exposure.hpp"
#include "floodopt/geometry.hpp"
#include "floodopt/raster.hpp"

namespace floodopt {

enum class InterventionKind { PermeablePaving, RainGarden, DetentionBasin };

inline std::string to_string(InterventionKind k)
{
    switch (k) {
    case InterventionKind::PermeablePaving: return "permeable_paving";
    case InterventionKind::RainGarden: return "rain_garden";
    case InterventionKind::DetentionBasin: return "detention_basin";
    }
    return "?";
}

inline InterventionKind intervention_kind_from_string(const std::string& s)
{
    if (s == "permeable_paving")
        return InterventionKind::PermeablePaving;
    if (s == "rain_garden")
        return InterventionKind::RainGarden;
    if (s == "detention_basin")
        return InterventionKind::DetentionBasin;
    throw InputError("unknown intervention kind '" + s + "'");
}

struct InterventionSpec {
    std::string id;
    InterventionKind kind = InterventionKind::PermeablePaving;
    Ring zone;                  // optional footprint of a zonal feature
    std::vector<Cell> cells;    // grid cells affected by a zonal feature
    double area = 0.0;          // m2, quantity basis of zonal features
    double retention_factor = 1.0;
    std::map<std::string, double> infiltration; // passed through to external evaluators
    Point origin;               // basin centre before shifts
    std::vector<Cell> downstream; // basin surrogate drawdown path
};

struct EvaluatorBinding {
    enum class Type { Surrogate, External } type = Type::Surrogate;
    std::string command;
    double timeout_s = 3600.0;
    std::string workdir_root; // empty: system temp directory
};

struct ProblemDefinition {
    GenotypeLayout layout;
    std::vector<InterventionSpec> interventions; // aligned with layout.features()
    std::map<InterventionKind, CostSchedule> schedules;
    ExposureModel exposure;
    std::optional<Raster> baseline_depth;
    std::optional<Raster> dem;
    std::vector<Ring> exclusion_polygons; // pavements and other protected surfaces
    double exclusion_buffer = 5.0;        // m
    EvaluatorBinding evaluator;
    std::vector<std::uint8_t> exclusion_mask; // per DEM cell, filled by build_exclusion_mask
};

struct BasinGeometry {
    Point centre;
    double area = 0.0;  // m2
    double depth = 0.0; // m
    double radius() const { return std::sqrt(area / std::numbers::pi); }
    double volume() const { return area * depth; }
};

inline std::size_t characteristic_position(const FeatureSpec& f, const std::string& name)
{
    for (std::size_t c = 0; c < f.characteristics.size(); ++c)
        if (f.characteristics[c].name == name)
            return c;
    throw InputError("basin '" + f.id + "' has no '" + name + "' characteristic");
}

inline BasinGeometry basin_geometry(const InterventionSpec& spec, const FeatureSpec& f, const FeatureState& s)
{
    BasinGeometry g;
    g.depth = s.values.at(characteristic_position(f, "depth"));
    g.area = s.values.at(characteristic_position(f, "area"));
    g.centre = {spec.origin.x + s.values.at(characteristic_position(f, "x_shift")),
                spec.origin.y + s.values.at(characteristic_position(f, "y_shift"))};
    return g;
}

inline bool feature_active(const InterventionSpec& spec, const FeatureSpec& f, const FeatureState& s)
{
    if (f.style == FeatureStyle::Zonal)
        return s.included;
    if (spec.kind == InterventionKind::DetentionBasin)
        return basin_geometry(spec, f, s).depth > 0.0;
    return true;
}

/// Cost quantity in the schedule's unit: m2 for zonal features, excavated m3 for basins.
inline double feature_quantity(const InterventionSpec& spec, const FeatureSpec& f, const FeatureState& s)
{
    if (!feature_active(spec, f, s))
        return 0.0;
    if (spec.kind == InterventionKind::DetentionBasin)
        return basin_geometry(spec, f, s).volume();
    return spec.area;
}

inline const CostSchedule& schedule_for(const ProblemDefinition& problem, InterventionKind kind)
{
    auto it = problem.schedules.find(kind);
    if (it == problem.schedules.end())
        throw InputError("no cost schedule configured for " + to_string(kind));
    return it->second;
}

inline std::vector<double> cost_breakdown(const Phenotype& p, const ProblemDefinition& problem)
{
    const auto& features = problem.layout.features();
    if (p.features.size() != features.size())
        throw InputError("phenotype does not match the problem layout");
    std::vector<double> out(features.size(), 0.0);
    for (std::size_t f = 0; f < features.size(); ++f) {
        const auto& spec = problem.interventions[f];
        const double q = feature_quantity(spec, features[f], p.features[f]);
        if (q > 0.0)
            out[f] = whole_life_cost(schedule_for(problem, spec.kind), q);
    }
    return out;
}

inline double scenario_cost(const Phenotype& p, const ProblemDefinition& problem)
{
    double total = 0.0;
    for (double c : cost_breakdown(p, problem))
        total += c;
    return total;
}

/// Marks DEM cells whose centre lies within the buffer distance of a building or exclusion polygon.
inline std::vector<std::uint8_t> build_exclusion_mask(const GridFrame& frame, const std::vector<Building>& buildings,
                                                      const std::vector<Ring>& polygons, double buffer)
{
    std::vector<std::uint8_t> mask(frame.rows * frame.cols, 0);
    auto mark = [&](const Ring& raw) {
        const Ring ring = open_ring(raw);
        if (ring.size() < 3)
            return;
        const Box bb = bounding_box(ring);
        const Cell nw = frame.locate({bb.x0 - buffer, bb.y1 + buffer});
        const Cell se = frame.locate({bb.x1 + buffer, bb.y0 - buffer});
        for (auto r = std::max<std::int64_t>(nw.row, 0); r <= std::min<std::int64_t>(se.row, frame.rows - 1); ++r)
            for (auto c = std::max<std::int64_t>(nw.col, 0); c <= std::min<std::int64_t>(se.col, frame.cols - 1);
                 ++c) {
                const Cell cell{r, c};
                if (distance_to_ring(frame.centre(cell), ring) <= buffer)
                    mask[frame.index(cell)] = 1;
            }
    };
    for (const auto& b : buildings)
        mark(b.footprint);
    for (const auto& p : polygons)
        mark(p);
    return mask;
}

struct CarveResult {
    Raster dem;
    std::size_t lowered = 0;
    std::size_t interior = 0;
    std::size_t masked = 0;
    double rim = 0.0;
};

/// Excavates a circular basin: interior cells drop to (10th-percentile perimeter elevation - depth)
/// wherever that lowers them and the cell is not masked.
inline CarveResult carve_basin(const Raster& dem, const BasinGeometry& basin, const std::vector<std::uint8_t>& mask)
{
    CarveResult out{dem, 0, 0, 0, 0.0};
    if (!(basin.depth > 0.0) || !(basin.area > 0.0))
        return out;
    if (!mask.empty() && mask.size() != dem.values.size())
        throw InputError("exclusion mask does not match the DEM frame");
    const auto& frame = dem.frame;
    const double r = basin.radius();
    const Cell nw = frame.locate({basin.centre.x - r, basin.centre.y + r});
    const Cell se = frame.locate({basin.centre.x + r, basin.centre.y - r});
    std::vector<double> perimeter;
    std::vector<std::size_t> interior;
    for (auto row = std::max<std::int64_t>(nw.row, 0); row <= std::min<std::int64_t>(se.row, frame.rows - 1); ++row)
        for (auto col = std::max<std::int64_t>(nw.col, 0); col <= std::min<std::int64_t>(se.col, frame.cols - 1);
             ++col) {
            const Cell cell{row, col};
            const Box b = frame.cell_box(cell);
            const double dx_near = std::max({b.x0 - basin.centre.x, 0.0, basin.centre.x - b.x1});
            const double dy_near = std::max({b.y0 - basin.centre.y, 0.0, basin.centre.y - b.y1});
            const double dx_far = std::max(std::abs(b.x0 - basin.centre.x), std::abs(b.x1 - basin.centre.x));
            const double dy_far = std::max(std::abs(b.y0 - basin.centre.y), std::abs(b.y1 - basin.centre.y));
            const double near = std::hypot(dx_near, dy_near);
            const double far = std::hypot(dx_far, dy_far);
            const double v = dem.at(cell);
            if (near <= r && r <= far && !dem.is_nodata(v))
                perimeter.push_back(v);
            const Point c = frame.centre(cell);
            if (std::hypot(c.x - basin.centre.x, c.y - basin.centre.y) <= r)
                interior.push_back(frame.index(cell));
        }
    out.interior = interior.size();
    if (perimeter.empty() || interior.empty())
        return out;
    out.rim = nearest_rank_percentile(perimeter, 10);
    const double floor_level = out.rim - basin.depth;
    for (auto i : interior) {
        if (!mask.empty() && mask[i]) {
            ++out.masked;
            continue;
        }
        double& v = out.dem.values[i];
        if (dem.is_nodata(v) || v <= floor_level)
            continue;
        v = floor_level;
        ++out.lowered;
    }
    return out;
}

/// Deterministic stand-in for a hydrodynamic model: zonal features scale the depth of their cells,
/// basins then draw down volume d*A along their downstream path.
inline Raster surrogate_evaluate(const Phenotype& p, const ProblemDefinition& problem)
{
    if (!problem.baseline_depth)
        throw ConfigError("the surrogate evaluator needs a baseline depth grid");
    Raster depth = *problem.baseline_depth;
    const auto& features = problem.layout.features();
    const auto& frame = depth.frame;
    const double cell_area = frame.cellsize * frame.cellsize;
    for (std::size_t f = 0; f < features.size(); ++f) {
        const auto& spec = problem.interventions[f];
        if (features[f].style != FeatureStyle::Zonal || !p.features[f].included)
            continue;
        for (const auto& c : spec.cells) {
            double& v = depth.values[frame.index(c)];
            if (!depth.is_nodata(v))
                v *= spec.retention_factor;
        }
    }
    for (std::size_t f = 0; f < features.size(); ++f) {
        const auto& spec = problem.interventions[f];
        if (spec.kind != InterventionKind::DetentionBasin || !feature_active(spec, features[f], p.features[f]))
            continue;
        double remaining = basin_geometry(spec, features[f], p.features[f]).volume();
        for (const auto& c : spec.downstream) {
            if (remaining <= 0.0)
                break;
            double& v = depth.values[frame.index(c)];
            if (depth.is_nodata(v) || v <= 0.0)
                continue;
            const double take = std::min(v * cell_area, remaining);
            remaining -= take;
            v = std::max(0.0, v - take / cell_area);
        }
    }
    return depth;
}

struct Violation {
    int guideline = 0; // 0: structural problem outside the four design guidelines
    std::string feature;
    std::string message;
    bool hard = true;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<std::string> notes;

    bool ok() const
    {
        return std::none_of(violations.begin(), violations.end(), [](const Violation& v) { return v.hard; });
    }
};

inline ValidationReport validate_problem(const ProblemDefinition& problem)
{
    ValidationReport rep;
    auto add = [&rep](int g, const std::string& f, const std::string& m, bool hard = true) {
        rep.violations.push_back({g, f, m, hard});
    };
    const auto& features = problem.layout.features();
    if (problem.interventions.size() != features.size())
        add(0, "", "layout has " + std::to_string(features.size()) + " features but " +
                       std::to_string(problem.interventions.size()) + " interventions are bound");
    if (features.empty())
        add(0, "", "no features configured");
    std::map<std::string, int> seen;
    const std::size_t n = std::min(features.size(), problem.interventions.size());
    for (std::size_t f = 0; f < n; ++f) {
        const auto& fs = features[f];
        const auto& spec = problem.interventions[f];
        if (++seen[fs.id] > 1)
            add(0, fs.id, "duplicate feature id");
        if (spec.id != fs.id)
            add(0, fs.id, "intervention '" + spec.id + "' bound to the wrong feature");
        if (spec.kind == InterventionKind::DetentionBasin) {
            if (fs.style != FeatureStyle::Local) {
                add(0, fs.id, "detention basins must be local features");
                continue;
            }
            try {
                const auto& depth = fs.characteristics[characteristic_position(fs, "depth")];
                const auto& area = fs.characteristics[characteristic_position(fs, "area")];
                characteristic_position(fs, "x_shift");
                characteristic_position(fs, "y_shift");
                if (index_to_value(0, depth) != 0.0)
                    add(1, fs.id, "basin depth minimum must be 0 m to encode exclusion");
                if (!(index_to_value(0, area) > 0.0))
                    add(2, fs.id, "basin area minimum must be positive");
            } catch (const InputError& e) {
                add(2, fs.id, e.what());
            }
            if (problem.evaluator.type == EvaluatorBinding::Type::Surrogate && spec.downstream.empty())
                add(0, fs.id, "basin has no downstream cells for the surrogate evaluator", false);
        } else {
            if (fs.style != FeatureStyle::Zonal)
                add(0, fs.id, "paving and rain gardens must be zonal features");
            if (!(spec.area > 0.0))
                add(3, fs.id, "zonal feature area must be positive");
            if (!(spec.retention_factor > 0.0 && spec.retention_factor <= 1.0))
                add(3, fs.id, "retention factor must lie in (0, 1]");
            if (problem.evaluator.type == EvaluatorBinding::Type::Surrogate && spec.cells.empty())
                add(0, fs.id, "zone covers no grid cells", false);
        }
        if (problem.baseline_depth)
            for (const auto& c : spec.cells)
                if (!problem.baseline_depth->frame.contains(c))
                    add(0, fs.id, "zone cell outside the grid");
    }
    for (const auto& [kind, s] : problem.schedules) {
        try {
            s.validate();
        } catch (const InputError& e) {
            add(0, to_string(kind), e.what());
        }
        if (!(s.base_rate > 0.0))
            add(3, to_string(kind), "installation cost must be positive");
    }
    for (std::size_t f = 0; f < n; ++f)
        if (!problem.schedules.count(problem.interventions[f].kind))
            add(3, features[f].id, "no cost schedule for " + to_string(problem.interventions[f].kind));
    if (problem.evaluator.type == EvaluatorBinding::Type::Surrogate && !problem.baseline_depth)
        add(0, "", "surrogate evaluator needs a baseline depth grid");
    if (problem.evaluator.type == EvaluatorBinding::Type::External) {
        if (problem.evaluator.command.empty())
            add(0, "", "external evaluator command is empty");
        if (!problem.dem)
            add(0, "", "external evaluator needs a DEM");
        if (!(problem.evaluator.timeout_s > 0.0))
            add(0, "", "evaluator timeout must be positive");
    }
    if (problem.baseline_depth && !(problem.baseline_depth->frame == problem.exposure.frame()))
        add(0, "", "baseline depth grid frame differs from the exposure frame");
    if (problem.dem && !(problem.dem->frame == problem.exposure.frame()))
        add(0, "", "DEM frame differs from the exposure frame");
    if (problem.baseline_depth)
        for (double v : problem.baseline_depth->values)
            if (!problem.baseline_depth->is_nodata(v) && v < 0.0) {
                add(0, "", "baseline depth grid holds negative depths");
                break;
            }
    for (const auto& id : problem.exposure.buildings_outside_grid())
        add(0, id, "building footprint lies outside the grid", false);
    rep.notes.push_back("guidelines 3 and 4 (no intervention raises the exposure metric) are monitored at run time");
    return rep;
}

} // namespace floodopt

#endif
