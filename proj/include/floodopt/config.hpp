#ifndef FLOODOPT_CONFIG_HPP
#define FLOODOPT_CONFIG_HPP

// JSON problem configuration. Relative paths resolve against the config file's directory.
//
//   grid         {"depth": "baseline.asc", "dem": "dem.asc"}
//   buildings    GeoJSON FeatureCollection of Polygons with properties id, use_class
//   exposure     {"metric": "high_count" | "expected_damages", "buffer_cells": 1,
//                 "thresholds": {"mean": 0.1, "p90": 0.3}, "damage_curves": {"residential": [[d, gbp], ...]}}
//   exclusions   {"polygons": "file.geojson" | [[[x, y], ...], ...], "buffer_m": 5}
//   costs        per-kind overrides of the default schedules
//   features     zonal: {"id", "kind", "area", "cells": [[r, c], ...] | "polygon": [[x, y], ...], "retention_factor"}
//                basin: {"id", "kind": "detention_basin", "origin": [x, y], "downstream": [[r, c], ...],
//                        "characteristics": [{"name", "min", "max", "step" | "bits", "scheme"} | {"name", "values"}]}
//   evaluator    {"type": "surrogate" | "external", "command", "timeout_s", "workdir"}
//   run          optimiser defaults (max_front, population, max_generations, ...)
//   exhaustive_cap

#include <bit>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "floodopt/cost.hpp"
#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"
#include "floodopt/exposure.hpp"
#include "floodopt/moea.hpp"
#include "floodopt/problem.hpp"
#include "floodopt/raster.hpp"
#include "floodopt/spea2.hpp"
#include "floodopt/util.hpp"

namespace floodopt {

struct LoadedConfig {
    std::filesystem::path path;
    nlohmann::json document;
    ProblemDefinition problem;
    RunConfig run;
    BaselineConfig baseline;
    unsigned workers = 0; // 0 = hardware concurrency
    std::uint64_t exhaustive_cap = std::uint64_t{1} << 20;
    std::string config_digest;  // raw config bytes
    std::string problem_digest; // config minus "run" plus every referenced file
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const std::string& key, const std::string& ctx)
{
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(ctx + ": missing required key '" + key + "'");
    return j.at(key);
}

template <class T>
T as(const json& j, const std::string& ctx)
{
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
}

template <class T>
T value_or(const json& j, const std::string& key, T fallback, const std::string& ctx)
{
    if (!j.is_object() || !j.contains(key))
        return fallback;
    return as<T>(j.at(key), ctx + "." + key);
}

inline double finite(const json& j, const std::string& ctx)
{
    const double v = as<double>(j, ctx);
    if (!std::isfinite(v))
        throw ConfigError(ctx + ": value must be finite");
    return v;
}

struct Loader {
    std::filesystem::path base;
    Fnv1a64 problem_hash;

    std::string resolve(const std::string& rel) const
    {
        const std::filesystem::path p(rel);
        return (p.is_absolute() ? p : base / p).lexically_normal().string();
    }

    std::string read(const std::string& rel, const std::string& ctx)
    {
        std::string text;
        try {
            text = read_text_file(resolve(rel));
        } catch (const ConfigError&) {
            throw ConfigError(ctx + ": cannot read '" + resolve(rel) + "'");
        }
        problem_hash.update(rel);
        problem_hash.update(text);
        return text;
    }

    Raster grid(const std::string& rel, const std::string& ctx)
    {
        const auto text = read(rel, ctx);
        try {
            return parse_ascii_grid(text, resolve(rel));
        } catch (const InputError& e) {
            throw ConfigError(ctx + ": " + e.what());
        }
    }

    json geojson(const std::string& rel, const std::string& ctx)
    {
        const auto text = read(rel, ctx);
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(ctx + ": '" + resolve(rel) + "': " + e.what());
        }
    }
};

inline Ring ring_from(const json& j, const std::string& ctx)
{
    if (!j.is_array() || j.size() < 3)
        throw ConfigError(ctx + ": a polygon ring needs at least three [x, y] vertices");
    Ring r;
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto& v = j[k];
        if (!v.is_array() || v.size() < 2)
            throw ConfigError(ctx + "[" + std::to_string(k) + "]: vertex must be [x, y]");
        r.push_back({finite(v[0], ctx), finite(v[1], ctx)});
    }
    return open_ring(std::move(r));
}

/// Outer rings of every Polygon / MultiPolygon feature, paired with the feature's properties.
inline std::vector<std::pair<Ring, json>> polygons_of(const json& fc, const std::string& ctx)
{
    if (!fc.is_object() || fc.value("type", "") != "FeatureCollection" || !fc.contains("features"))
        throw ConfigError(ctx + ": expected a GeoJSON FeatureCollection");
    std::vector<std::pair<Ring, json>> out;
    const auto& feats = fc.at("features");
    for (std::size_t k = 0; k < feats.size(); ++k) {
        const std::string fctx = ctx + ".features[" + std::to_string(k) + "]";
        const auto& geom = require(feats[k], "geometry", fctx);
        const std::string type = value_or<std::string>(geom, "type", "", fctx);
        const json props = feats[k].value("properties", json::object());
        const auto& coords = require(geom, "coordinates", fctx + ".geometry");
        if (type == "Polygon") {
            out.emplace_back(ring_from(coords.at(0), fctx), props);
        } else if (type == "MultiPolygon") {
            for (const auto& poly : coords)
                out.emplace_back(ring_from(poly.at(0), fctx), props);
        } else {
            throw ConfigError(fctx + ": unsupported geometry type '" + type + "'");
        }
    }
    return out;
}

inline std::vector<Cell> cells_from(const json& j, const std::string& ctx)
{
    if (!j.is_array())
        throw ConfigError(ctx + ": expected a list of [row, col] pairs");
    std::vector<Cell> out;
    for (const auto& c : j) {
        if (!c.is_array() || c.size() != 2)
            throw ConfigError(ctx + ": cell must be [row, col]");
        out.push_back({as<std::int64_t>(c[0], ctx), as<std::int64_t>(c[1], ctx)});
    }
    return out;
}

inline unsigned bits_for(std::uint64_t count, Scheme scheme, const std::string& ctx)
{
    if (count < 2)
        throw ConfigError(ctx + ": a characteristic needs at least two values");
    if (scheme == Scheme::Unary)
        return static_cast<unsigned>(count - 1);
    if (!std::has_single_bit(count))
        throw ConfigError(ctx + ": " + std::to_string(count) + " values cannot be encoded without redundancy by a " +
                          std::string(to_string(scheme)) + " codeword (need a power of two)");
    return static_cast<unsigned>(std::countr_zero(count));
}

inline CharacteristicSpec characteristic_from(const json& j, const std::string& ctx)
{
    const std::string name = as<std::string>(require(j, "name", ctx), ctx + ".name");
    const std::string c = ctx + "(" + name + ")";
    Scheme scheme;
    try {
        scheme = scheme_from_string(value_or<std::string>(j, "scheme", "gray", c));
    } catch (const InputError& e) {
        throw ConfigError(c + ": " + e.what());
    }
    try {
        if (j.contains("values")) {
            auto values = as<std::vector<double>>(j.at("values"), c + ".values");
            const unsigned bits = bits_for(values.size(), scheme, c);
            return CharacteristicSpec::discrete(name, std::move(values), bits, scheme);
        }
        const double lo = finite(require(j, "min", c), c + ".min");
        const double hi = finite(require(j, "max", c), c + ".max");
        if (j.contains("bits"))
            return CharacteristicSpec::continuous(name, lo, hi, as<unsigned>(j.at("bits"), c + ".bits"), scheme);
        const double step = finite(require(j, "step", c), c + ".step");
        if (!(step > 0.0) || !(hi > lo))
            throw ConfigError(c + ": need max > min and a positive step");
        const auto count = static_cast<std::uint64_t>(std::llround((hi - lo) / step)) + 1;
        return CharacteristicSpec::continuous(name, lo, hi, bits_for(count, scheme, c), scheme);
    } catch (const InputError& e) {
        throw ConfigError(c + ": " + e.what());
    }
}

inline void apply_cost_overrides(CostSchedule& s, const json& j, const std::string& ctx)
{
    s.unit = value_or<std::string>(j, "unit", s.unit, ctx);
    s.base_rate = value_or<double>(j, "base_rate", s.base_rate, ctx);
    s.fee_fraction = value_or<double>(j, "fee_fraction", s.fee_fraction, ctx);
    s.decommission_fraction = value_or<double>(j, "decommission_fraction", s.decommission_fraction, ctx);
    s.discount_rate = value_or<double>(j, "discount_rate", s.discount_rate, ctx);
    s.lifespan = value_or<int>(j, "lifespan", s.lifespan, ctx);
    if (j.contains("annual")) {
        s.annual.clear();
        for (const auto& a : j.at("annual"))
            s.annual.push_back({finite(require(a, "rate", ctx + ".annual"), ctx), value_or<bool>(a, "per_unit", true, ctx)});
    }
    if (j.contains("periodic")) {
        s.periodic.clear();
        for (const auto& p : j.at("periodic"))
            s.periodic.push_back({as<int>(require(p, "period", ctx + ".periodic"), ctx),
                                  finite(require(p, "cost", ctx + ".periodic"), ctx),
                                  value_or<bool>(p, "per_unit", true, ctx), value_or<bool>(p, "major", false, ctx),
                                  value_or<bool>(p, "skip_in_major_years", false, ctx)});
    }
    if (j.contains("oneoff")) {
        s.oneoff.clear();
        for (const auto& o : j.at("oneoff"))
            s.oneoff.push_back({as<int>(require(o, "year", ctx + ".oneoff"), ctx),
                                finite(require(o, "cost", ctx + ".oneoff"), ctx),
                                value_or<bool>(o, "per_unit", true, ctx)});
    }
}

inline RiskMetric metric_from(const std::string& s, const std::string& ctx)
{
    if (s == "high_count")
        return RiskMetric::HighCount;
    if (s == "expected_damages")
        return RiskMetric::ExpectedDamages;
    throw ConfigError(ctx + ": unknown metric '" + s + "' (expected high_count or expected_damages)");
}

inline void load_run(LoadedConfig& out, const json& r)
{
    const std::string ctx = "run";
    auto& rc = out.run;
    rc.max_front = value_or<std::size_t>(r, "max_front", rc.max_front, ctx);
    rc.delta_p = value_or<double>(r, "delta_p", rc.delta_p, ctx);
    rc.injection_rate = value_or<double>(r, "injection_rate", rc.injection_rate, ctx);
    rc.lag_window = value_or<std::size_t>(r, "lag_window", rc.lag_window, ctx);
    rc.max_generations = value_or<std::size_t>(r, "max_generations", rc.max_generations, ctx);
    rc.mutation_prob = value_or<double>(r, "mutation_prob", rc.mutation_prob, ctx);
    rc.crossover_prob = value_or<double>(r, "crossover_prob", rc.crossover_prob, ctx);
    rc.adaptation_enabled = value_or<bool>(r, "adaptation", rc.adaptation_enabled, ctx);
    rc.population_sizing = value_or<bool>(r, "population_sizing", rc.population_sizing, ctx);
    rc.initial_population = value_or<std::size_t>(r, "initial_population", rc.initial_population, ctx);
    rc.max_evaluations = value_or<std::size_t>(r, "max_evaluations", rc.max_evaluations, ctx);
    rc.seed = value_or<std::uint64_t>(r, "seed", rc.seed, ctx);

    auto& bc = out.baseline;
    bc.population = value_or<std::size_t>(r, "population", bc.population, ctx);
    bc.archive_size = value_or<std::size_t>(r, "archive_size", bc.population, ctx);
    bc.max_generations = rc.max_generations;
    bc.max_evaluations = rc.max_evaluations;
    bc.mutation_prob = rc.mutation_prob;
    bc.crossover_prob = rc.crossover_prob;
    bc.seed = rc.seed;
    out.workers = value_or<unsigned>(r, "workers", 0u, ctx);
}

} // namespace detail

/// Parses a configuration held in memory; `base` anchors relative file references.
inline LoadedConfig load_config_text(const std::string& text, const std::filesystem::path& base,
                                     const std::string& origin = "<config>")
{
    using nlohmann::json;
    using namespace detail;
    LoadedConfig out;
    try {
        out.document = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    const json& doc = out.document;
    if (!doc.is_object())
        throw ConfigError(origin + ": top level must be an object");
    out.config_digest = digest_of(text);

    Loader ld{base, {}};
    json problem_part = doc;
    problem_part.erase("run");
    ld.problem_hash.update(problem_part.dump());

    auto& p = out.problem;
    const json grid = doc.value("grid", json::object());
    if (grid.contains("depth"))
        p.baseline_depth = ld.grid(as<std::string>(grid.at("depth"), "grid.depth"), "grid.depth");
    if (grid.contains("dem"))
        p.dem = ld.grid(as<std::string>(grid.at("dem"), "grid.dem"), "grid.dem");
    if (!p.baseline_depth && !p.dem)
        throw ConfigError(origin + ": grid needs a depth or dem raster");
    const GridFrame frame = p.baseline_depth ? p.baseline_depth->frame : p.dem->frame;

    const json exp = doc.value("exposure", json::object());
    const int k = value_or<int>(exp, "buffer_cells", 1, "exposure");
    if (k < 1)
        throw ConfigError("exposure.buffer_cells must be at least 1");
    ExposureThresholds th;
    if (exp.contains("thresholds")) {
        th.mean = value_or<double>(exp.at("thresholds"), "mean", th.mean, "exposure.thresholds");
        th.p90 = value_or<double>(exp.at("thresholds"), "p90", th.p90, "exposure.thresholds");
    }
    std::map<UseClass, DamageCurve> curves;
    if (exp.contains("damage_curves"))
        for (const auto& [name, pts] : exp.at("damage_curves").items()) {
            const std::string ctx = "exposure.damage_curves." + name;
            try {
                curves.emplace(use_class_from_string(name),
                               DamageCurve(as<std::vector<std::pair<double, double>>>(pts, ctx)));
            } catch (const InputError& e) {
                throw ConfigError(ctx + ": " + e.what());
            }
        }
    const RiskMetric metric = metric_from(value_or<std::string>(exp, "metric", "high_count", "exposure"), "exposure.metric");

    std::vector<Building> buildings;
    if (doc.contains("buildings")) {
        const auto fc = ld.geojson(as<std::string>(doc.at("buildings"), "buildings"), "buildings");
        std::set<std::string> ids;
        for (auto& [ring, props] : polygons_of(fc, "buildings")) {
            Building b;
            b.id = props.contains("id") ? (props.at("id").is_string() ? props.at("id").get<std::string>()
                                                                       : props.at("id").dump())
                                        : "b" + std::to_string(buildings.size() + 1);
            if (!ids.insert(b.id).second)
                throw ConfigError("buildings: duplicate id '" + b.id + "'");
            b.footprint = std::move(ring);
            try {
                b.use_class = use_class_from_string(props.value("use_class", std::string("residential")));
            } catch (const InputError& e) {
                throw ConfigError("buildings." + b.id + ": " + e.what());
            }
            b.buffer_cells_k = k;
            buildings.push_back(std::move(b));
        }
    }
    try {
        p.exposure = ExposureModel(frame, buildings, metric, curves, th);
    } catch (const InputError& e) {
        throw ConfigError(std::string("exposure: ") + e.what());
    }

    if (doc.contains("exclusions")) {
        const auto& ex = doc.at("exclusions");
        p.exclusion_buffer = value_or<double>(ex, "buffer_m", p.exclusion_buffer, "exclusions");
        if (ex.contains("polygons")) {
            const auto& pj = ex.at("polygons");
            if (pj.is_string()) {
                for (auto& [ring, props] : polygons_of(ld.geojson(pj.get<std::string>(), "exclusions.polygons"),
                                                       "exclusions.polygons"))
                    p.exclusion_polygons.push_back(std::move(ring));
            } else {
                for (const auto& r : pj)
                    p.exclusion_polygons.push_back(ring_from(r, "exclusions.polygons"));
            }
        }
    }

    p.schedules = {{InterventionKind::PermeablePaving, permeable_paving_schedule()},
                   {InterventionKind::RainGarden, rain_garden_schedule()},
                   {InterventionKind::DetentionBasin, detention_basin_schedule()}};
    if (doc.contains("costs"))
        for (const auto& [name, body] : doc.at("costs").items()) {
            InterventionKind kind;
            try {
                kind = intervention_kind_from_string(name);
            } catch (const InputError& e) {
                throw ConfigError(std::string("costs: ") + e.what());
            }
            apply_cost_overrides(p.schedules[kind], body, "costs." + name);
        }

    const auto& feats = require(doc, "features", origin);
    if (!feats.is_array())
        throw ConfigError("features must be an array");
    std::vector<FeatureSpec> specs;
    for (std::size_t f = 0; f < feats.size(); ++f) {
        const auto& fj = feats[f];
        const std::string ctx = "features[" + std::to_string(f) + "]";
        InterventionSpec s;
        s.id = as<std::string>(require(fj, "id", ctx), ctx + ".id");
        const std::string fctx = "feature '" + s.id + "'";
        try {
            s.kind = intervention_kind_from_string(as<std::string>(require(fj, "kind", fctx), fctx + ".kind"));
        } catch (const InputError& e) {
            throw ConfigError(fctx + ": " + e.what());
        }
        if (fj.contains("infiltration"))
            s.infiltration = as<std::map<std::string, double>>(fj.at("infiltration"), fctx + ".infiltration");
        if (s.kind == InterventionKind::DetentionBasin) {
            const auto& o = require(fj, "origin", fctx);
            if (!o.is_array() || o.size() != 2)
                throw ConfigError(fctx + ": origin must be [x, y]");
            s.origin = {finite(o[0], fctx + ".origin"), finite(o[1], fctx + ".origin")};
            if (fj.contains("downstream"))
                s.downstream = cells_from(fj.at("downstream"), fctx + ".downstream");
            std::vector<CharacteristicSpec> chars;
            for (const auto& cj : require(fj, "characteristics", fctx))
                chars.push_back(characteristic_from(cj, fctx));
            specs.push_back(FeatureSpec::local(s.id, std::move(chars)));
        } else {
            s.area = finite(require(fj, "area", fctx), fctx + ".area");
            s.retention_factor = value_or<double>(fj, "retention_factor", 1.0, fctx);
            if (fj.contains("cells"))
                s.cells = cells_from(fj.at("cells"), fctx + ".cells");
            if (fj.contains("polygon")) {
                s.zone = ring_from(fj.at("polygon"), fctx + ".polygon");
                auto covered = footprint_cells(s.zone, frame);
                s.cells.insert(s.cells.end(), covered.begin(), covered.end());
                std::sort(s.cells.begin(), s.cells.end());
                s.cells.erase(std::unique(s.cells.begin(), s.cells.end()), s.cells.end());
            }
            specs.push_back(FeatureSpec::zonal(s.id));
        }
        p.interventions.push_back(std::move(s));
    }
    try {
        p.layout = GenotypeLayout(std::move(specs));
    } catch (const InputError& e) {
        throw ConfigError(std::string("features: ") + e.what());
    }

    if (doc.contains("evaluator")) {
        const auto& ej = doc.at("evaluator");
        const std::string type = value_or<std::string>(ej, "type", "surrogate", "evaluator");
        if (type == "external")
            p.evaluator.type = EvaluatorBinding::Type::External;
        else if (type != "surrogate")
            throw ConfigError("evaluator.type: unknown evaluator '" + type + "'");
        p.evaluator.command = value_or<std::string>(ej, "command", "", "evaluator");
        p.evaluator.timeout_s = value_or<double>(ej, "timeout_s", p.evaluator.timeout_s, "evaluator");
        const std::string wd = value_or<std::string>(ej, "workdir", "", "evaluator");
        p.evaluator.workdir_root = wd.empty() ? wd : ld.resolve(wd);
    }
    if (p.dem)
        p.exclusion_mask = build_exclusion_mask(p.dem->frame, buildings, p.exclusion_polygons, p.exclusion_buffer);

    load_run(out, doc.value("run", json::object()));
    out.exhaustive_cap = value_or<std::uint64_t>(doc, "exhaustive_cap", out.exhaustive_cap, origin);
    out.problem_digest = ld.problem_hash.hex();
    return out;
}

inline LoadedConfig load_config(const std::string& path)
{
    const std::filesystem::path p(path);
    auto cfg = load_config_text(read_text_file(path), p.parent_path(), path);
    cfg.path = p;
    return cfg;
}

inline unsigned effective_workers(unsigned requested)
{
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace floodopt

#endif
