#include "cropforge/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "cropforge/error.hpp"
#include "cropforge/parallel.hpp"
#include "cropforge/rng.hpp"

namespace cropforge {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr WeatherAggregate kAggregates[] = {WeatherAggregate::Tmax, WeatherAggregate::Tmin,
                                            WeatherAggregate::Srad, WeatherAggregate::RainDepth,
                                            WeatherAggregate::RainProbability};

double round1(double v) { return std::round(v * 10.0) / 10.0; }

}  // namespace

std::string_view aggregate_name(WeatherAggregate a) noexcept {
  switch (a) {
    case WeatherAggregate::Tmax:
      return "tmax";
    case WeatherAggregate::Tmin:
      return "tmin";
    case WeatherAggregate::Srad:
      return "srad";
    case WeatherAggregate::RainDepth:
      return "rain_depth";
    case WeatherAggregate::RainProbability:
      return "rain_prob";
  }
  return "unknown";
}

std::vector<ParameterRange> ParameterSpace::ranges() const {
  std::vector<ParameterRange> out;
  for (const CoefficientBound& b : genetic_bounds) out.push_back({b.name, b.lo, b.hi});
  for (WeatherAggregate a : kAggregates) {
    for (std::size_t p = 0; p < kSeasonPeriods; ++p) {
      const double base = weather_base.get(a, p);
      const double half = variation * std::abs(base);
      out.push_back({std::string(aggregate_name(a)) + "_p" + std::to_string(p + 1), base - half, base + half});
    }
  }
  return out;
}

void ParameterSpace::validate() const {
  if (genetic_bounds.size() != kGeneticDimension) {
    throw ValidationError("parameter space: expected " + std::to_string(kGeneticDimension) +
                          " genetic bounds, got " + std::to_string(genetic_bounds.size()));
  }
  if (!(variation > 0.0 && variation < 1.0)) throw ValidationError("parameter space: variation must be in (0,1)");
  for (const ParameterRange& r : ranges()) {
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi)) {
      throw ValidationError("parameter space: empty or non-finite range for " + r.name);
    }
  }
  for (std::size_t p = 0; p < kSeasonPeriods; ++p) {
    const double prob = weather_base.get(WeatherAggregate::RainProbability, p);
    if (prob * (1.0 + variation) > 1.0) throw ValidationError("parameter space: rain probability range exceeds 1");
    for (WeatherAggregate a : {WeatherAggregate::Srad, WeatherAggregate::RainDepth, WeatherAggregate::RainProbability}) {
      if (!(weather_base.get(a, p) > 0.0)) {
        throw ValidationError("parameter space: " + std::string(aggregate_name(a)) + " base must be > 0");
      }
    }
  }
  if (!(noise.temperature_fraction >= 0.0 && noise.srad_fraction >= 0.0 && noise.rain_fraction >= 0.0)) {
    throw ValidationError("parameter space: noise fractions must be >= 0");
  }
}

ParameterSpace default_parameter_space() {
  ParameterSpace space;
  space.genetic_bounds = default_genetic_bounds();
  space.weather_base.values = {
      27.0, 30.0, 28.0,  // tmax
      15.0, 18.0, 16.0,  // tmin
      22.0, 23.0, 19.0,  // srad
      8.0,  9.0,  8.0,   // rain depth
      0.3,  0.3,  0.3,   // rain probability
  };
  return space;
}

ParameterSpace parse_parameter_space(std::string_view json_text, std::vector<CoefficientBound> bounds) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("weather space: ") + e.what());
  }
  ParameterSpace space;
  space.genetic_bounds = std::move(bounds);
  try {
    if (doc.at("version").get<int>() != 1) throw ParseError("weather space: unsupported version");
    space.variation = doc.at("variation").get<double>();
    const json& base = doc.at("base");
    for (WeatherAggregate a : kAggregates) {
      const auto values = base.at(std::string(aggregate_name(a))).get<std::vector<double>>();
      if (values.size() != kSeasonPeriods) {
        throw ParseError("weather space: '" + std::string(aggregate_name(a)) + "' needs " +
                         std::to_string(kSeasonPeriods) + " values");
      }
      for (std::size_t p = 0; p < kSeasonPeriods; ++p) {
        space.weather_base.values[static_cast<std::size_t>(a) * kSeasonPeriods + p] = values[p];
      }
    }
    if (doc.contains("noise")) {
      const json& n = doc.at("noise");
      space.noise.temperature_fraction = n.value("temperature_fraction", space.noise.temperature_fraction);
      space.noise.srad_fraction = n.value("srad_fraction", space.noise.srad_fraction);
      space.noise.rain_fraction = n.value("rain_fraction", space.noise.rain_fraction);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("weather space: ") + e.what());
  }
  space.validate();
  return space;
}

std::string write_weather_space(const ParameterSpace& space) {
  ordered_json doc;
  doc["version"] = 1;
  doc["variation"] = space.variation;
  ordered_json base = ordered_json::object();
  for (WeatherAggregate a : kAggregates) {
    ordered_json values = ordered_json::array();
    for (std::size_t p = 0; p < kSeasonPeriods; ++p) values.push_back(space.weather_base.get(a, p));
    base[std::string(aggregate_name(a))] = values;
  }
  doc["base"] = base;
  doc["noise"] = {{"temperature_fraction", space.noise.temperature_fraction},
                  {"srad_fraction", space.noise.srad_fraction},
                  {"rain_fraction", space.noise.rain_fraction}};
  return doc.dump(2) + "\n";
}

std::vector<double> map_to_space(const ParameterSpace& space, std::span<const double> unit_point) {
  const auto ranges = space.ranges();
  if (unit_point.size() != ranges.size()) throw ValidationError("map_to_space: dimension mismatch");
  std::vector<double> out(ranges.size());
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    out[i] = ranges[i].lo + unit_point[i] * (ranges[i].hi - ranges[i].lo);
  }
  return out;
}

std::vector<double> sample_parameters(const ParameterSpace& space, SobolSequence& seq) {
  if (seq.dimension() != space.dimension()) throw ValidationError("sample_parameters: sequence dimension mismatch");
  return map_to_space(space, seq.next());
}

void SeasonWindow::validate() const {
  if (length_days < 90 || length_days > 240) throw ValidationError("season length must be in [90, 240] days");
  if (start_doy < 1 || start_doy > days_in_year(year)) throw ValidationError("season start day out of range");
}

WeatherSeries synthesize_daily_weather(std::span<const double> weather_params, const SeasonWindow& season,
                                       std::uint64_t seed, const WeatherNoise& noise) {
  season.validate();
  if (weather_params.size() != kWeatherParameters) {
    throw ValidationError("synthesize_daily_weather: expected " + std::to_string(kWeatherParameters) +
                          " parameters");
  }
  for (double v : weather_params) {
    if (!std::isfinite(v)) throw ValidationError("synthesize_daily_weather: non-finite parameter");
  }
  auto param = [&](WeatherAggregate a, std::size_t p) {
    return weather_params[static_cast<std::size_t>(a) * kSeasonPeriods + p];
  };

  Rng rng(seed);
  WeatherSeries series;
  series.station_id = "SYNTH";
  series.records.reserve(static_cast<std::size_t>(season.length_days));
  Date day{season.year, season.start_doy};
  for (int i = 0; i < season.length_days; ++i, day = next_day(day)) {
    const auto p = static_cast<std::size_t>(i) * kSeasonPeriods / static_cast<std::size_t>(season.length_days);
    const double tmax_mean = param(WeatherAggregate::Tmax, p);
    const double tmin_mean = param(WeatherAggregate::Tmin, p);
    const double srad_mean = param(WeatherAggregate::Srad, p);
    const double depth = param(WeatherAggregate::RainDepth, p);
    const double prob = param(WeatherAggregate::RainProbability, p);

    WeatherRecord r;
    r.year = day.year;
    r.doy = day.doy;
    r.tmax = round1(rng.normal(tmax_mean, noise.temperature_fraction * std::abs(tmax_mean)));
    r.tmin = round1(rng.normal(tmin_mean, noise.temperature_fraction * std::abs(tmin_mean)));
    r.srad = round1(rng.normal(srad_mean, noise.srad_fraction * std::abs(srad_mean)));
    const bool wet = rng.uniform() < prob;
    const double amount = rng.normal(depth, noise.rain_fraction * std::abs(depth));
    r.rain = wet ? round1(std::max(0.0, amount)) : 0.0;
    if (r.tmax < r.tmin + 0.5) r.tmax = round1(r.tmin + 0.5);
    if (r.srad < 0.1) r.srad = 0.1;
    series.records.push_back(r);
  }
  return series;
}

std::uint64_t row_seed(std::uint64_t seed, std::size_t row) noexcept {
  return hash64({seed, 0x53414d50ULL, static_cast<std::uint64_t>(row)});
}

double label_sample(const ParameterSpace& space, std::span<const double> physical, const SeasonWindow& season,
                    const SoilProfile& soil, std::uint64_t seed) {
  const std::size_t g = space.genetic_bounds.size();
  if (physical.size() != space.dimension()) throw ValidationError("label_sample: dimension mismatch");
  GeneticCoefficients genetics;
  genetics.bounds = space.genetic_bounds;
  genetics.values.resize(g);
  for (std::size_t i = 0; i < g; ++i) {
    const CoefficientBound& b = space.genetic_bounds[i];
    genetics.values[i] = std::clamp((physical[i] - b.lo) / (b.hi - b.lo), 0.0, 1.0);
  }
  const WeatherSeries weather = synthesize_daily_weather(physical.subspan(g), season, seed, space.noise);
  ManagementPlan plan;
  plan.planting = {season.year, season.start_doy};
  return simulate(plan, weather, genetics, soil).yield_kg_ha;
}

DatasetResult generate_dataset(const ParameterSpace& space, std::size_t n, const SeasonWindow& season,
                               const SoilProfile& soil, std::uint64_t seed, std::size_t workers) {
  space.validate();
  season.validate();
  if (n == 0) throw ValidationError("generate_dataset: n must be >= 1");
  const std::size_t d = space.dimension();

  SobolSequence seq(d);
  std::vector<double> points(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = sample_parameters(space, seq);
    std::copy(p.begin(), p.end(), points.begin() + static_cast<std::ptrdiff_t>(i * d));
  }

  std::vector<double> yields(n);
  const auto errors = parallel_for(n, workers, [&](std::size_t i) {
    yields[i] = label_sample(space, std::span<const double>(points).subspan(i * d, d), season, soil,
                             row_seed(seed, i));
  });

  DatasetResult result;
  result.dataset.n_features = d;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        result.failures.push_back({i, e.what()});
      }
      continue;
    }
    result.dataset.features.insert(result.dataset.features.end(), points.begin() + static_cast<std::ptrdiff_t>(i * d),
                                   points.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
    result.dataset.yields.push_back(yields[i]);
  }
  if (static_cast<double>(result.failures.size()) > kMaxFailureFraction * static_cast<double>(n)) {
    throw Error("generate_dataset: " + std::to_string(result.failures.size()) + " of " + std::to_string(n) +
                " rows failed (limit 5%); first: " + result.failures.front().message);
  }
  return result;
}

}  // namespace cropforge
