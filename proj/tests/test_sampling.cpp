#include <gtest/gtest.h>

#include <cmath>

#include "cropforge/error.hpp"
#include "cropforge/io.hpp"
#include "cropforge/rng.hpp"
#include "cropforge/sampling.hpp"
#include "support.hpp"

using namespace cropforge;

namespace {

std::vector<double> flat_weather(double tmax, double tmin, double srad, double depth, double prob) {
  std::vector<double> p;
  for (double v : {tmax, tmin, srad, depth, prob}) p.insert(p.end(), kSeasonPeriods, v);
  return p;
}

}  // namespace

TEST(Space, DefaultShape) {
  const ParameterSpace space = default_parameter_space();
  EXPECT_EQ(space.dimension(), 33u);
  const auto ranges = space.ranges();
  ASSERT_EQ(ranges.size(), 33u);
  for (const auto& r : ranges) EXPECT_LT(r.lo, r.hi) << r.name;
  EXPECT_EQ(ranges[18].name, "tmax_p1");
}

TEST(Space, ShippedFileMatchesBuiltIn) {
  const ParameterSpace parsed =
      parse_parameter_space(read_text_file(test::data_path("weather_space.json")), default_genetic_bounds());
  EXPECT_EQ(parsed.weather_base.values, default_parameter_space().weather_base.values);
  EXPECT_EQ(write_weather_space(parsed), write_weather_space(default_parameter_space()));
}

TEST(Space, MappingEndpoints) {
  ParameterSpace space = default_parameter_space();
  space.weather_base.values[0] = 28.0;
  const auto ranges = space.ranges();
  EXPECT_NEAR(ranges[18].lo, 23.8, 1e-12);
  EXPECT_NEAR(ranges[18].hi, 32.2, 1e-12);

  const std::vector<double> zeros(33, 0.0);
  const auto lo = map_to_space(space, zeros);
  const std::vector<double> almost(33, std::nextafter(1.0, 0.0));
  const auto hi = map_to_space(space, almost);
  for (std::size_t i = 0; i < 33; ++i) {
    EXPECT_EQ(lo[i], ranges[i].lo);
    EXPECT_NEAR(hi[i], ranges[i].hi, 1e-12 * std::max(1.0, std::abs(ranges[i].hi)));
  }
}

TEST(Space, SampledPointsStayInRanges) {
  const ParameterSpace space = default_parameter_space();
  const auto ranges = space.ranges();
  SobolSequence seq(space.dimension());
  for (int i = 0; i < 2000; ++i) {
    const auto p = sample_parameters(space, seq);
    for (std::size_t k = 0; k < p.size(); ++k) {
      ASSERT_GE(p[k], ranges[k].lo);
      ASSERT_LT(p[k], ranges[k].hi);
    }
  }
}

TEST(Weather, NoRainWhenProbabilityZero) {
  const auto w = synthesize_daily_weather(flat_weather(28, 15, 20, 8, 0.0), {2018, 120, 180}, 3);
  ASSERT_EQ(w.records.size(), 180u);
  for (const auto& r : w.records) EXPECT_EQ(r.rain, 0.0);
}

TEST(Weather, SeededAndContiguous) {
  const auto params = flat_weather(28, 15, 20, 8, 0.3);
  const auto a = synthesize_daily_weather(params, {2018, 300, 120}, 9);
  EXPECT_EQ(a, synthesize_daily_weather(params, {2018, 300, 120}, 9));
  EXPECT_NE(a, synthesize_daily_weather(params, {2018, 300, 120}, 10));
  Date d{2018, 300};
  for (const auto& r : a.records) {
    EXPECT_EQ(r.date(), d);
    d = next_day(d);
    EXPECT_NO_THROW(validate_weather_record(r));
  }
}

TEST(Weather, LawOfLargeNumbers) {
  const auto params = flat_weather(28, 15, 20, 8, 0.4);
  double tmax = 0.0;
  double wet = 0.0;
  std::size_t days = 0;
  for (std::uint64_t seed = 0; seed < 42; ++seed) {
    for (const auto& r : synthesize_daily_weather(params, {2018, 100, 240}, seed).records) {
      tmax += r.tmax;
      wet += r.rain > 0.0 ? 1.0 : 0.0;
      ++days;
    }
  }
  ASSERT_GE(days, 10000u);
  EXPECT_NEAR(tmax / days, 28.0, 0.1);
  EXPECT_NEAR(wet / days, 0.4, 0.02);
}

TEST(Weather, RecordInvariantsUnderRandomParameters) {
  const ParameterSpace space = default_parameter_space();
  const auto ranges = space.ranges();
  Rng rng(2);
  for (int i = 0; i < 100000; ++i) {
    std::vector<double> params(kWeatherParameters);
    for (std::size_t k = 0; k < kWeatherParameters; ++k) {
      const auto& r = ranges[kGeneticDimension + k];
      params[k] = r.lo + rng.uniform() * (r.hi - r.lo);
    }
    const auto w = synthesize_daily_weather(params, {2018, 120, 90}, static_cast<std::uint64_t>(i), space.noise);
    for (const auto& r : w.records) {
      ASSERT_GE(r.tmax, r.tmin + 0.5 - 1e-12);
      ASSERT_GE(r.srad, 0.1);
      ASSERT_GE(r.rain, 0.0);
      ASSERT_TRUE(std::isfinite(r.tmax) && std::isfinite(r.tmin) && std::isfinite(r.srad) && std::isfinite(r.rain));
    }
  }
}

TEST(Weather, RejectsBadInput) {
  auto params = flat_weather(28, 15, 20, 8, 0.3);
  EXPECT_THROW(synthesize_daily_weather(params, {2018, 120, 60}, 1), ValidationError);
  EXPECT_THROW(synthesize_daily_weather(params, {2018, 120, 300}, 1), ValidationError);
  params[4] = std::nan("");
  EXPECT_THROW(synthesize_daily_weather(params, {2018, 120, 120}, 1), ValidationError);
  params.pop_back();
  EXPECT_THROW(synthesize_daily_weather(params, {2018, 120, 120}, 1), ValidationError);
}

TEST(Dataset, SingleRowMatchesDirectLabel) {
  const ParameterSpace space = default_parameter_space();
  const SeasonWindow season;
  const auto soil = test::default_soil();
  const DatasetResult r = generate_dataset(space, 1, season, soil, 42, 1);
  ASSERT_EQ(r.dataset.rows(), 1u);
  SobolSequence seq(33);
  const auto p = sample_parameters(space, seq);
  EXPECT_EQ(std::vector<double>(r.dataset.row(0), r.dataset.row(0) + 33), p);
  EXPECT_EQ(r.dataset.yields[0], label_sample(space, p, season, soil, row_seed(42, 0)));
}

TEST(Dataset, DeterministicAcrossWorkerCounts) {
  const ParameterSpace space = default_parameter_space();
  const auto soil = test::default_soil();
  const DatasetResult a = generate_dataset(space, 64, {}, soil, 7, 1);
  const DatasetResult b = generate_dataset(space, 64, {}, soil, 7, 4);
  EXPECT_TRUE(a.failures.empty());
  EXPECT_EQ(write_dataset(a.dataset), write_dataset(b.dataset));
  for (double y : a.dataset.yields) {
    EXPECT_TRUE(std::isfinite(y));
    EXPECT_GE(y, 0.0);
  }
}

TEST(Dataset, RowSeedsDiffer) {
  EXPECT_NE(row_seed(1, 0), row_seed(1, 1));
  EXPECT_NE(row_seed(1, 0), row_seed(2, 0));
}

TEST(Dataset, RejectsZeroRows) {
  EXPECT_THROW(generate_dataset(default_parameter_space(), 0, {}, test::default_soil(), 1, 1), ValidationError);
}
