#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "cropforge/calibration.hpp"
#include "cropforge/crop_model.hpp"
#include "cropforge/error.hpp"
#include "cropforge/evaluation.hpp"
#include "cropforge/rng.hpp"
#include "cropforge/sampling.hpp"
#include "support.hpp"

using namespace cropforge;

namespace {

// tests/oracles/crop_reference.py
constexpr double kReferenceYield = 2552.5130204065285;
constexpr double kReferenceBiomass = 13042.598389441084;
constexpr std::size_t kReferenceDays = 97;

ManagementPlan at_maturity(Date planting) {
  ManagementPlan p;
  p.planting = planting;
  return p;
}

GeneticCoefficients midpoint() { return midpoint_coefficients(default_genetic_bounds()); }

GeneticCoefficients random_genetics(Rng& rng) {
  GeneticCoefficients g = midpoint();
  for (double& v : g.values) v = rng.uniform();
  return g;
}

WeatherSeries random_season(std::uint64_t seed) {
  return synthesize_daily_weather(default_parameter_space().weather_base.values, {2016, 100, 240}, seed);
}

}  // namespace

TEST(Gdd, Examples) {
  EXPECT_DOUBLE_EQ(gdd_day(30, 20, 10), 15.0);
  EXPECT_DOUBLE_EQ(gdd_day(12, 6, 10), 0.0);
  EXPECT_DOUBLE_EQ(gdd_day(25, 15, 8), 12.0);
  EXPECT_THROW(gdd_day(10, 12, 5), ValidationError);
}

TEST(Gdd, Accumulation) {
  const auto two = test::constant_weather({2018, 100}, 2, 20, 30, 20, 0);
  EXPECT_EQ(accumulate_gdd(two, 10, {2018, 100}, {2018, 101}), (std::vector<double>{15, 30}));
  EXPECT_TRUE(accumulate_gdd(two, 10, {2018, 101}, {2018, 100}).empty());

  const auto season = test::constant_weather({2018, 100}, 110, 20, 30, 20, 0);
  const auto sum = accumulate_gdd(season, 10, {2018, 100}, {2018, 209});
  ASSERT_EQ(sum.size(), 110u);
  EXPECT_DOUBLE_EQ(sum.back(), 1650.0);
  EXPECT_GE(sum.back(), 1600.0);
  EXPECT_LE(sum.back(), 1770.0);
  EXPECT_TRUE(std::is_sorted(sum.begin(), sum.end()));
}

TEST(Gdd, GapInWindowFails) {
  auto w = test::constant_weather({2018, 100}, 10, 20, 30, 20, 0);
  w.records.erase(w.records.begin() + 4);
  EXPECT_THROW(accumulate_gdd(w, 10, {2018, 100}, {2018, 109}), ValidationError);
}

TEST(Coefficients, Mapping) {
  GeneticCoefficients g{{0.0, 1.0, 0.5}, {{"a", 1, 5, ""}, {"b", 1, 5, ""}, {"c", 2, 4, ""}}};
  EXPECT_EQ(map_coefficients(g), (std::vector<double>{1.0, 5.0, 3.0}));
  g.values[0] = 1.2;
  EXPECT_THROW(g.validate(), ValidationError);
}

TEST(Coefficients, BoundsTableShape) {
  const auto& b = default_genetic_bounds();
  ASSERT_EQ(b.size(), kGeneticDimension);
  for (const auto& c : b) EXPECT_LT(c.lo, c.hi) << c.name;
  EXPECT_EQ(b[16].lo, -15.0);
  EXPECT_EQ(b[17].hi, 15.0);
}

TEST(Simulate, MatchesHandSteppedOracle) {
  const auto w = test::constant_weather({2018, 120}, 120, 20, 28, 16, 5);
  const auto out = simulate(at_maturity({2018, 120}), w, midpoint(), test::default_soil());
  EXPECT_NEAR(out.yield_kg_ha, kReferenceYield, 1e-9 * kReferenceYield);
  EXPECT_NEAR(out.biomass_series.back(), kReferenceBiomass, 1e-9 * kReferenceBiomass);
  EXPECT_EQ(out.lai_series.size(), kReferenceDays);
  ASSERT_TRUE(out.maturity_doy.has_value());
  EXPECT_EQ(*out.maturity_doy, 120 + static_cast<int>(kReferenceDays) - 1);
}

TEST(Simulate, ZeroRadiation) {
  const auto w = test::constant_weather({2018, 120}, 120, 0, 28, 16, 5);
  const auto out = simulate(at_maturity({2018, 120}), w, midpoint(), test::default_soil());
  EXPECT_EQ(out.yield_kg_ha, 0.0);
  for (double b : out.biomass_series) EXPECT_EQ(b, 0.0);
  for (double l : out.lai_series) EXPECT_LE(l, model_constants::kLaiSeed);
}

TEST(Simulate, Deterministic) {
  const auto w = random_season(3);
  Rng rng(9);
  const auto g = random_genetics(rng);
  const auto soil = test::default_soil();
  const auto plan = plan_for_season({}, 2016, g);
  EXPECT_EQ(simulate(plan, w, g, soil), simulate(plan, w, g, soil));
}

TEST(Simulate, InvariantsOverRandomInputs) {
  Rng rng(17);
  const auto soil = test::default_soil();
  for (int i = 0; i < 300; ++i) {
    const auto w = random_season(static_cast<std::uint64_t>(i));
    const auto g = random_genetics(rng);
    SeasonCalendar cal;
    cal.harvest_at_maturity = i % 2 == 0;
    const auto out = simulate(plan_for_season(cal, 2016, g), w, g, soil);
    EXPECT_GE(out.yield_kg_ha, 0.0);
    const double lai_max = map_coefficients(g)[5];
    for (std::size_t d = 0; d < out.lai_series.size(); ++d) {
      EXPECT_GE(out.lai_series[d], 0.0);
      EXPECT_LE(out.lai_series[d], lai_max + 1e-9);
      if (d > 0) EXPECT_GE(out.biomass_series[d], out.biomass_series[d - 1]);
    }
  }
}

TEST(Simulate, RueMonotoneWithoutWaterStress) {
  const auto soil = test::default_soil();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto w = random_season(seed);
    for (auto& r : w.records) r.rain = 60.0;
    Rng rng(seed + 100);
    auto g = random_genetics(rng);
    double prev = -1.0;
    for (double rue = 0.0; rue <= 1.0; rue += 0.1) {
      g.values[4] = rue;
      const double y = simulate(plan_for_season({}, 2016, g), w, g, soil).yield_kg_ha;
      EXPECT_GE(y, prev) << "seed " << seed << " rue " << rue;
      prev = y;
    }
  }
}

TEST(Simulate, EarlyHarvestNeverRaisesYield) {
  const auto soil = test::default_soil();
  Rng rng(4);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto w = random_season(seed);
    const auto g = random_genetics(rng);
    ManagementPlan plan = at_maturity({2016, 130});
    const auto full = simulate(plan, w, g, soil);
    if (!full.maturity_doy) continue;
    plan.harvest = Date{2016, std::max(131, *full.maturity_doy - 10)};
    EXPECT_LE(simulate(plan, w, g, soil).yield_kg_ha, full.yield_kg_ha);
  }
}

TEST(Simulate, WeatherGapFails) {
  auto w = test::constant_weather({2018, 120}, 120, 20, 28, 16, 5);
  w.records.erase(w.records.begin() + 30);
  EXPECT_THROW(simulate(at_maturity({2018, 120}), w, midpoint(), test::default_soil()), ValidationError);
}

TEST(Simulate, UncoveredPlantingFails) {
  const auto w = test::constant_weather({2018, 120}, 120, 20, 28, 16, 5);
  EXPECT_THROW(simulate(at_maturity({2018, 110}), w, midpoint(), test::default_soil()), ValidationError);
}

TEST(Simulate, PlanValidation) {
  ManagementPlan p = at_maturity({2018, 120});
  p.harvest = Date{2018, 120};
  EXPECT_THROW(p.validate(), ValidationError);
  p.harvest.reset();
  p.initial_soil_water_fraction = 1.5;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Simulate, WaterCapacityFromClay) {
  const auto soil = test::default_soil();
  EXPECT_DOUBLE_EQ(soil_water_capacity_mm(soil), (0.05 + 0.001 * soil.mean_clay()) * 1000.0);
}

TEST(Evaluation, OwnWeatherReproducesCalibrationRun) {
  Rng rng(8);
  const auto g = random_genetics(rng);
  const auto w = random_season(5);
  const auto soil = test::default_soil();
  const SeasonCalendar cal;
  CalibrationEntry e;
  e.calibration_values = g.values;
  EvaluationSetup setup;
  setup.calendar = cal;
  const double direct = simulate(plan_for_season(cal, 2016, g), w, g, soil).yield_kg_ha;
  EXPECT_EQ(evaluate_entry(e, 2016, w, soil, setup), direct);
}

TEST(Evaluation, ZeroRadiationTargetGivesZero) {
  CalibrationEntry e;
  e.calibration_values = midpoint().values;
  const auto w = test::constant_weather({2016, 100}, 240, 0, 28, 16, 5);
  EXPECT_EQ(evaluate_entry(e, 2016, w, test::default_soil(), {}), 0.0);
}

TEST(Evaluation, OneSimulationPerEntry) {
  CalibrationEntry e;
  e.calibration_values = midpoint().values;
  const auto w = random_season(1);
  const auto before = simulation_call_count();
  evaluate_entry(e, 2016, w, test::default_soil(), {});
  EXPECT_EQ(simulation_call_count() - before, 1u);
}
