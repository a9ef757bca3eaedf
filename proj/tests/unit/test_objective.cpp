#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "floodopt.hpp"
#include "support.hpp"

using namespace floodopt;

namespace {

GridFrame unit_frame(std::size_t rows, std::size_t cols) { return GridFrame{0.0, 0.0, 1.0, rows, cols}; }

Building building_in(const GridFrame& f, Cell c, UseClass use = UseClass::Residential, int k = 1)
{
    const Box b = f.cell_box(c);
    const double in = 0.1 * f.cellsize;
    return {"b", Ring{{b.x0 + in, b.y0 + in}, {b.x1 - in, b.y0 + in}, {b.x1 - in, b.y1 - in}, {b.x0 + in, b.y1 - in}}, use, k};
}

} // namespace

TEST(BufferCells, RingsAroundOneCell)
{
    const auto f = unit_frame(7, 7);
    const auto k1 = buffer_cells(building_in(f, {3, 3}), f, 1);
    EXPECT_EQ(k1.size(), 8u);
    EXPECT_EQ(std::count(k1.begin(), k1.end(), Cell{3, 3}), 0);
    EXPECT_EQ(buffer_cells(building_in(f, {3, 3}), f, 2).size(), 24u);
    Building far{"far", Ring{{100, 100}, {101, 100}, {101, 101}, {100, 101}}};
    EXPECT_TRUE(buffer_cells(far, f, 1).empty());
}

TEST(BufferCells, ClippedAtGridEdge)
{
    const auto f = unit_frame(5, 5);
    EXPECT_EQ(buffer_cells(building_in(f, {0, 0}), f, 1).size(), 3u);
}

TEST(Exposure, FourClassesAtThresholds)
{
    EXPECT_EQ(classify_exposure(0.05, 0.20), ExposureClass::Low);
    EXPECT_EQ(classify_exposure(0.15, 0.35), ExposureClass::High);
    EXPECT_EQ(classify_exposure(0.05, 0.35), ExposureClass::MediumI);
    EXPECT_EQ(classify_exposure(0.15, 0.20), ExposureClass::MediumII);
    EXPECT_EQ(classify_exposure(0.10, 0.30), ExposureClass::High);
    EXPECT_EQ(classify_exposure(std::nextafter(0.10, 0.0), 0.30), ExposureClass::MediumI);
    EXPECT_EQ(classify_exposure(0.10, std::nextafter(0.30, 0.0)), ExposureClass::MediumII);
    EXPECT_THROW(classify_exposure(-0.1, 0.2), InputError);
}

TEST(Exposure, NearestRankPercentile)
{
    std::vector<double> ten;
    for (int i = 1; i <= 10; ++i)
        ten.push_back(0.1 * i);
    EXPECT_DOUBLE_EQ(percentile_90(ten), 0.9);
    EXPECT_DOUBLE_EQ(percentile_90(std::vector<double>(6, 0.4)), 0.4);
    EXPECT_DOUBLE_EQ(percentile_90(std::vector<double>{0.7}), 0.7);
    EXPECT_THROW(percentile_90(std::vector<double>{}), InputError);
}

TEST(Exposure, RiskMetrics)
{
    const auto f = unit_frame(3, 7);
    std::vector<Building> bs{building_in(f, {1, 1}), building_in(f, {1, 5})};
    const Raster dry(f, 0.0);
    const std::map<UseClass, DamageCurve> flat{{UseClass::Residential, DamageCurve({{0.0, 2500.0}})}};
    EXPECT_EQ(risk_metric(dry, bs, RiskMetric::HighCount), 0.0);
    EXPECT_EQ(risk_metric(dry, bs, RiskMetric::ExpectedDamages, flat), 0.0);
    const Raster wet(f, 0.5);
    EXPECT_EQ(risk_metric(wet, bs, RiskMetric::HighCount), 2.0);
    EXPECT_DOUBLE_EQ(risk_metric(wet, bs, RiskMetric::ExpectedDamages, flat), 5000.0);
}

TEST(Exposure, DamageCurveLookup)
{
    const auto f = unit_frame(3, 3);
    Raster grid(f, 3.4 / 7.0);
    grid.at({0, 0}) = 0.6;
    grid.at({1, 1}) = 0.0; // the footprint cell is not part of the buffer
    const std::map<UseClass, DamageCurve> curves{
        {UseClass::Residential, DamageCurve({{0.0, 0.0}, {0.5, 40000.0}, {1.0, 40000.0}})}};
    ExposureModel m(f, {building_in(f, {1, 1})}, RiskMetric::ExpectedDamages, curves);
    const auto e = m.analyse(grid);
    EXPECT_NEAR(e[0].mean_depth, 0.5, 1e-12);
    EXPECT_DOUBLE_EQ(e[0].p90_depth, 0.6);
    EXPECT_NEAR(m.risk(grid), 40000.0, 1e-6);
    EXPECT_THROW(ExposureModel(f, {building_in(f, {1, 1}, UseClass::Commercial)}, RiskMetric::ExpectedDamages, curves),
                 InputError);
}

TEST(DamageCurve, ValidatesShape)
{
    EXPECT_THROW(DamageCurve(std::vector<std::pair<double, double>>{}), InputError);
    EXPECT_THROW(DamageCurve({{0.0, 0.0}, {0.0, 1.0}}), InputError);
    EXPECT_THROW(DamageCurve({{0.0, 5.0}, {1.0, 1.0}}), InputError);
    const DamageCurve c({{0.0, 0.0}, {1.0, 100.0}});
    EXPECT_DOUBLE_EQ(c(0.25), 25.0);
    EXPECT_DOUBLE_EQ(c(2.0), 100.0);
}

TEST(Cost, PavingOracle)
{
    EXPECT_NEAR(whole_life_cost(permeable_paving_schedule(), 1.0), 116.51318334099376, 1e-9);
    EXPECT_NEAR(whole_life_cost(permeable_paving_schedule(), 1.0), 116.51, 0.05);
    EXPECT_EQ(whole_life_cost(permeable_paving_schedule(), 0.0), 0.0);
    EXPECT_THROW(whole_life_cost(permeable_paving_schedule(), -1.0), InputError);
}

TEST(Cost, CapexOnlyLimit)
{
    CostSchedule s;
    s.base_rate = 90.0;
    s.decommission_fraction = 0.0;
    s.discount_rate = 1e-12;
    EXPECT_DOUBLE_EQ(whole_life_cost(s, 1.0), 90.0 * 1.12);
}

TEST(Cost, MajorYearsSkipMinorItems)
{
    const auto s = detention_basin_schedule();
    EXPECT_DOUBLE_EQ(s.outflow(3, 10.0), 11.4 + 840.0);
    EXPECT_DOUBLE_EQ(s.outflow(30, 10.0), 11.4 + 8400.0);
    EXPECT_DOUBLE_EQ(s.outflow(31, 10.0), 11.4);
}

TEST(Cost, LinearInQuantity)
{
    const auto s = permeable_paving_schedule();
    EXPECT_NEAR(whole_life_cost(s, 1000.0), 1000.0 * whole_life_cost(s, 1.0), 1e-6);
}

namespace {

ProblemDefinition two_zone_problem()
{
    ProblemDefinition p;
    p.layout = GenotypeLayout({FeatureSpec::zonal("a"), FeatureSpec::zonal("b")});
    const auto f = unit_frame(10, 10);
    Raster base(f, 0.0);
    for (std::size_t i = 0; i < base.values.size(); ++i)
        base.values[i] = 0.01 * static_cast<double>(i % 37);
    p.baseline_depth = base;
    InterventionSpec a, b;
    a.id = "a";
    a.kind = InterventionKind::PermeablePaving;
    b.id = "b";
    b.kind = InterventionKind::RainGarden;
    for (std::int64_t r = 0; r < 10; ++r)
        for (std::int64_t c = 0; c < 10; ++c)
            ((r + c) % 2 ? a : b).cells.push_back({r, c});
    a.area = 1000.0;
    b.area = 20.0;
    a.retention_factor = 0.6;
    b.retention_factor = 0.3;
    p.interventions = {a, b};
    p.schedules = {{InterventionKind::PermeablePaving, permeable_paving_schedule()},
                   {InterventionKind::RainGarden, rain_garden_schedule()},
                   {InterventionKind::DetentionBasin, detention_basin_schedule()}};
    p.exposure = ExposureModel(f, {building_in(f, {4, 4})}, RiskMetric::HighCount, {});
    return p;
}

} // namespace

TEST(Surrogate, NoInterventionsKeepsBaseline)
{
    const auto p = two_zone_problem();
    const auto d = surrogate_evaluate(decode_genotype(BitString::from_string("00"), p.layout), p);
    EXPECT_EQ(d.values, p.baseline_depth->values);
}

TEST(Surrogate, MonotoneAndCommutative)
{
    const auto p = two_zone_problem();
    const auto base = p.baseline_depth->values;
    for (const char* g : {"10", "01", "11"}) {
        const auto d = surrogate_evaluate(decode_genotype(BitString::from_string(g), p.layout), p);
        for (std::size_t i = 0; i < base.size(); ++i)
            ASSERT_LE(d.values[i], base[i]);
    }
    auto swapped = p;
    std::swap(swapped.interventions[0], swapped.interventions[1]);
    swapped.layout = GenotypeLayout({FeatureSpec::zonal("b"), FeatureSpec::zonal("a")});
    const auto ab = surrogate_evaluate(decode_genotype(BitString::from_string("11"), p.layout), p);
    const auto ba = surrogate_evaluate(decode_genotype(BitString::from_string("11"), swapped.layout), swapped);
    EXPECT_EQ(ab.values, ba.values);
}

TEST(ScenarioCost, SumsActiveFeatures)
{
    const auto p = two_zone_problem();
    EXPECT_EQ(scenario_cost(decode_genotype(BitString::from_string("00"), p.layout), p), 0.0);
    EXPECT_NEAR(scenario_cost(decode_genotype(BitString::from_string("10"), p.layout), p),
                1000.0 * whole_life_cost(permeable_paving_schedule(), 1.0), 1e-6);
}

TEST(Carve, FlatDemAndOnlyLowerRule)
{
    const GridFrame f{0.0, 0.0, 1.0, 20, 20};
    const Raster dem(f, 10.0);
    BasinGeometry g{{10.0, 10.0}, 50.0, 1.5};
    auto out = carve_basin(dem, g, {});
    ASSERT_GT(out.interior, 0u);
    EXPECT_DOUBLE_EQ(out.rim, 10.0);
    for (std::size_t i = 0; i < dem.values.size(); ++i)
        EXPECT_TRUE(out.dem.values[i] == 10.0 || out.dem.values[i] == 8.5);
    EXPECT_EQ(out.lowered, out.interior);

    Raster deep = dem;
    deep.at(f.locate({10.0, 10.0})) = 5.0;
    EXPECT_DOUBLE_EQ(carve_basin(deep, g, {}).dem.at(f.locate({10.0, 10.0})), 5.0);

    g.depth = 0.0;
    EXPECT_EQ(carve_basin(dem, g, {}).dem.values, dem.values);

    g.depth = 1.5;
    std::vector<std::uint8_t> mask(dem.values.size(), 1);
    const auto masked = carve_basin(dem, g, mask);
    EXPECT_EQ(masked.dem.values, dem.values);
    EXPECT_EQ(masked.masked, masked.interior);
}

TEST(Validation, GuidelineBreaches)
{
    auto p = two_zone_problem();
    EXPECT_TRUE(validate_problem(p).ok());
    p.schedules[InterventionKind::PermeablePaving].base_rate = 0.0;
    const auto rep = validate_problem(p);
    EXPECT_FALSE(rep.ok());
    EXPECT_TRUE(std::any_of(rep.violations.begin(), rep.violations.end(), [](const Violation& v) { return v.guideline == 3; }));

    const auto bad = load_config(fotest::data_path("mixed/basin_depth_min.json"));
    const auto r1 = validate_problem(bad.problem);
    EXPECT_TRUE(std::any_of(r1.violations.begin(), r1.violations.end(), [](const Violation& v) { return v.guideline == 1; }));

    const auto city507 = load_config(fotest::data_path("city507/config.json"));
    EXPECT_TRUE(validate_problem(city507.problem).violations.empty());
}

TEST(FitnessCache, Memoises)
{
    int calls = 0;
    FitnessCache cache([&calls](const BitString& g) {
        ++calls;
        return ObjectiveVector{static_cast<double>(g[0]), 1.0};
    });
    const auto g = BitString::from_string("10");
    const auto a = cache.evaluate_batch({g, g});
    EXPECT_EQ(cache.unique_evaluations(), 1u);
    const auto b = cache.evaluate_batch({g});
    EXPECT_EQ(a[0], b[0]);
    EXPECT_EQ(cache.unique_evaluations(), 1u);
    EXPECT_EQ(calls, 1);
    EXPECT_EQ(cache.ledger().size(), 1u);
}

TEST(FitnessCache, ParallelMatchesSerial)
{
    const auto& o = fotest::surrogate12();
    std::vector<BitString> gs;
    for (std::uint64_t i = 0; i < 300; ++i)
        gs.push_back(genotype_at((i * 977) % 4096, 12));
    FitnessCache serial(make_objective(o.config.problem), 1);
    FitnessCache parallel(make_objective(o.config.problem), 4);
    EXPECT_EQ(serial.evaluate_batch(gs), parallel.evaluate_batch(gs));
    ASSERT_EQ(serial.ledger().size(), parallel.ledger().size());
    for (std::size_t k = 0; k < serial.ledger().size(); ++k)
        EXPECT_EQ(serial.ledger()[k].genotype, parallel.ledger()[k].genotype);
}

TEST(Objective, ExtremesOnSurrogate)
{
    const auto& o = fotest::surrogate12();
    FitnessCache cache(make_objective(o.config.problem));
    const auto z = cache.evaluate_batch({BitString(12), BitString::from_string("111111111111")});
    EXPECT_EQ(z[0][0], 0.0);
    EXPECT_EQ(z[0][1], baseline_risk(o.config.problem));
    EXPECT_LE(z[1][1], z[0][1]);
}

namespace {

LoadedConfig external_config(const std::string& command)
{
    auto cfg = load_config(fotest::data_path("mixed/config.json"));
    cfg.problem.evaluator.type = EvaluatorBinding::Type::External;
    cfg.problem.evaluator.command = command;
    cfg.problem.evaluator.timeout_s = 20.0;
    return cfg;
}

std::string copy_into_workdir(const std::string& rel)
{
    return "f() { cp '" + fotest::data_path(rel) + "' \"$1/depth.asc\"; }; f";
}

} // namespace

TEST(ExternalEvaluator, CopiesBaselineGrid)
{
    const auto cfg = external_config(copy_into_workdir("mixed/baseline_depth.asc"));
    const BitString g(cfg.problem.layout.total_length());
    const auto p = decode_genotype(g, cfg.problem.layout);
    const auto depth = external_evaluate(g, p, cfg.problem);
    EXPECT_EQ(depth.values, cfg.problem.baseline_depth->values);
}

TEST(ExternalEvaluator, ReportsExitStatusAndFrameMismatch)
{
    const auto fail = external_config("exit 3;");
    const BitString g(fail.problem.layout.total_length());
    const auto p = decode_genotype(g, fail.problem.layout);
    try {
        external_evaluate(g, p, fail.problem);
        FAIL() << "expected an evaluation error";
    } catch (const EvaluationError& e) {
        EXPECT_NE(std::string(e.what()).find("status 3"), std::string::npos) << e.what();
    }
    const auto mismatch = external_config(copy_into_workdir("toy2/baseline_depth.asc"));
    try {
        external_evaluate(g, p, mismatch.problem);
        FAIL() << "expected an evaluation error";
    } catch (const EvaluationError& e) {
        EXPECT_NE(std::string(e.what()).find("frame mismatch"), std::string::npos) << e.what();
    }
}

TEST(ExternalEvaluator, TimesOut)
{
    auto cfg = external_config("sleep 5;");
    cfg.problem.evaluator.timeout_s = 0.2;
    const BitString g(cfg.problem.layout.total_length());
    EXPECT_THROW(external_evaluate(g, decode_genotype(g, cfg.problem.layout), cfg.problem), EvaluationError);
}
