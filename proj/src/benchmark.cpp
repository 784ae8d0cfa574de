#include "cropforge/benchmark.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "cropforge/error.hpp"
#include "cropforge/io.hpp"
#include "cropforge/rng.hpp"
#include "cropforge/sampling.hpp"

namespace cropforge {

namespace {

constexpr const char* kCountyNames[] = {"Adams", "Brown", "Cass", "Dewitt", "Edgar", "Fulton", "Greene", "Hardin"};
constexpr std::size_t kRueIndex = 4;
constexpr std::size_t kHarvestIndex = 7;
constexpr std::size_t kFirstDateOffsetIndex = 16;

// Season window wide enough for the calendar plus both date offsets.
SeasonWindow weather_window(int year) { return {year, 110, 200}; }

double round4(double v) { return std::round(v * 1e4) / 1e4; }

}  // namespace

void BenchmarkConfig::validate() const {
  if (last_year - first_year < 3) throw ValidationError("benchmark needs at least 4 years");
  if (counties < 1 || counties > std::size(kCountyNames)) {
    throw ValidationError("benchmark supports 1.." + std::to_string(std::size(kCountyNames)) + " counties");
  }
  if (fields_per_county < 1) throw ValidationError("benchmark needs at least one field per county");
  for (double v : {county_spread, field_spread, drift_per_year, year_shock_sd, observation_noise_sd,
                   weather_year_sd}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError("benchmark spreads must be finite and >= 0");
  }
  if (!(anomaly_probability >= 0.0 && anomaly_probability <= 1.0)) {
    throw ValidationError("anomaly probability must be in [0,1]");
  }
  if (!(anomaly_loss >= 0.0 && anomaly_loss < 1.0)) throw ValidationError("anomaly loss must be in [0,1)");
  pso.validate();
}

CalibrationSetup benchmark_calibration_setup(const BenchmarkConfig& config) {
  CalibrationSetup setup;
  setup.pso = config.pso;
  setup.pso.seed = config.seed;
  return setup;
}

BenchmarkData make_benchmark(const BenchmarkConfig& config, const SoilProfile& soil) {
  config.validate();
  validate_soil(soil);
  const ParameterSpace space = default_parameter_space();
  const std::size_t dim = kGeneticDimension;

  BenchmarkData data;
  data.soil = soil;
  data.calendar = benchmark_calibration_setup(config).calendar;

  struct Field {
    std::string county;
    double lat, lon;
    std::vector<double> base;
  };
  std::vector<Field> fields;
  std::vector<std::vector<double>> year_shock(config.counties);
  std::vector<std::vector<std::array<double, kWeatherParameters>>> county_weather(config.counties);

  const int years = config.last_year - config.first_year + 1;
  for (std::size_t c = 0; c < config.counties; ++c) {
    Rng rng(hash64({config.seed, 0x434f554eULL, c}));
    std::vector<double> county_base(dim, 0.5);
    for (std::size_t k = 0; k < kFirstDateOffsetIndex; ++k) {
      county_base[k] = 0.5 + rng.uniform(-config.county_spread, config.county_spread);
    }
    // Leave headroom for the upward drift.
    county_base[kRueIndex] -= 0.2;
    county_base[kHarvestIndex] -= 0.2;
    for (int y = 0; y < years; ++y) {
      year_shock[c].push_back(rng.normal(0.0, config.year_shock_sd));
      std::array<double, kWeatherParameters> w = space.weather_base.values;
      for (double& v : w) v *= 1.0 + rng.normal(0.0, config.weather_year_sd);
      for (std::size_t p = 0; p < kSeasonPeriods; ++p) {
        double& prob = w[static_cast<std::size_t>(WeatherAggregate::RainProbability) * kSeasonPeriods + p];
        prob = std::clamp(prob, 0.0, 1.0);
      }
      county_weather[c].push_back(w);
    }
    const double lat0 = 39.5 + 0.5 * static_cast<double>(c);
    const double lon0 = -91.0 + 0.5 * static_cast<double>(c);
    for (std::size_t f = 0; f < config.fields_per_county; ++f) {
      Field field{kCountyNames[c], round4(lat0 + rng.uniform(-0.1, 0.1)), round4(lon0 + rng.uniform(-0.1, 0.1)),
                  county_base};
      for (std::size_t k = 0; k < kFirstDateOffsetIndex; ++k) {
        field.base[k] = std::clamp(field.base[k] + rng.uniform(-config.field_spread, config.field_spread), 0.0, 1.0);
      }
      fields.push_back(std::move(field));
    }
  }

  for (std::size_t fi = 0; fi < fields.size(); ++fi) {
    const Field& f = fields[fi];
    const std::size_t c = fi / config.fields_per_county;
    WeatherSeries all;
    all.station_id = field_weather_stem(f.county, f.lat, f.lon);
    for (int y = 0; y < years; ++y) {
      const WeatherSeries season = synthesize_daily_weather(
          county_weather[c][static_cast<std::size_t>(y)], weather_window(config.first_year + y),
          hash64({config.seed, 0x57544852ULL, fi, static_cast<std::uint64_t>(y)}));
      all.records.insert(all.records.end(), season.records.begin(), season.records.end());
    }
    data.field_weather.emplace(all.station_id, std::move(all));
  }

  for (int y = 0; y < years; ++y) {
    const int year = config.first_year + y;
    for (std::size_t fi = 0; fi < fields.size(); ++fi) {
      const Field& f = fields[fi];
      const std::size_t c = fi / config.fields_per_county;
      std::vector<double> truth = f.base;
      for (std::size_t k : {kRueIndex, kHarvestIndex}) {
        truth[k] = std::clamp(truth[k] + config.drift_per_year * y, 0.0, 1.0);
      }

      FieldObservation obs;
      obs.soil = soil;
      const WeatherSeries& all = data.field_weather.at(field_weather_stem(f.county, f.lat, f.lon));
      obs.weather.station_id = all.station_id;
      const auto window = weather_window(year);
      const std::size_t begin = static_cast<std::size_t>(y) * static_cast<std::size_t>(window.length_days);
      obs.weather.records.assign(all.records.begin() + static_cast<std::ptrdiff_t>(begin),
                                 all.records.begin() + static_cast<std::ptrdiff_t>(begin + window.length_days));

      const GeneticCoefficients genetics{truth, default_genetic_bounds()};
      const double simulated =
          simulate(plan_for_season(data.calendar, year, genetics), obs.weather, genetics, soil).yield_kg_ha;
      Rng rng(hash64({config.seed, 0x4f425356ULL, fi, static_cast<std::uint64_t>(y)}));
      const bool anomalous = rng.uniform() < config.anomaly_probability;
      const double loss = anomalous ? rng.uniform(0.5, 1.0) * config.anomaly_loss : 0.0;
      const double measured = simulated * (1.0 + year_shock[c][static_cast<std::size_t>(y)]) * (1.0 - loss) *
                              (1.0 + rng.normal(0.0, config.observation_noise_sd));

      obs.record = {year, f.lat, f.lon, static_cast<std::int64_t>(17001 + 2 * c), std::max(1.0, std::round(measured)),
                    "IL", f.county};
      data.observations.push_back(std::move(obs));
      data.truth.push_back(std::move(truth));
    }
  }
  return data;
}

WeatherLookup benchmark_weather(const BenchmarkData& data) {
  return [&data](const std::string& county, double lat, double lon) -> const WeatherSeries& {
    const auto it = data.field_weather.find(field_weather_stem(county, lat, lon));
    if (it == data.field_weather.end()) {
      throw ValidationError("no benchmark weather for " + field_weather_stem(county, lat, lon));
    }
    return it->second;
  };
}

double strategy_mape(std::span<const CountyMatrices> counties, Strategy strategy, std::span<const int> targets,
                     MapeLevel level, const RegionOptions& options) {
  double sum = 0.0;
  std::size_t count = 0;
  auto score = [&](double predicted, double observed) {
    sum += std::abs(predicted - observed) / observed;
    ++count;
  };
  for (const CountyMatrices& county : counties) {
    for (int target : targets) {
      if (level == MapeLevel::County) {
        const auto obs = county.observed.find(target);
        if (obs == county.observed.end()) continue;
        try {
          score(predict_region(county, strategy, target, options).mean, obs->second);
        } catch (const ValidationError&) {
        }
        continue;
      }
      for (const FieldMatrix& field : county.fields) {
        const auto obs = field.observed.find(target);
        if (obs == field.observed.end()) continue;
        const PredictionMatrix matrix =
            options.history ? field.matrix.restricted_to_history(target, *options.history) : field.matrix;
        try {
          score(ensemble_predict(strategy, matrix, target, field.observed, options.seed, options.quality),
                obs->second);
        } catch (const ValidationError&) {
        }
      }
    }
  }
  if (count == 0) {
    throw ValidationError("no target supports strategy " + std::string(strategy_name(strategy)));
  }
  return sum / static_cast<double>(count);
}

double all_previous_mape(std::span<const CountyMatrices> counties, std::span<const int> targets, MapeLevel level,
                         std::size_t seeds, const RegionOptions& options) {
  if (seeds == 0) throw ValidationError("all-previous needs at least one seed");
  double sum = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    RegionOptions o = options;
    o.seed = s;
    sum += strategy_mape(counties, Strategy::AllPrevious, targets, level, o);
  }
  return sum / static_cast<double>(seeds);
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config, const SoilProfile& soil, std::size_t workers,
                              std::size_t seeds) {
  const BenchmarkData data = make_benchmark(config, soil);
  const CalibrationSetup setup = benchmark_calibration_setup(config);
  BatchResult batch = calibrate_batch(data.observations, setup, workers);

  BenchmarkReport report;
  report.seeds = seeds;
  report.failed = batch.failures.size();
  report.calibrated = data.observations.size() - report.failed;
  // Quality needs two earlier calibration years.
  for (int y = config.first_year + 2; y <= config.last_year; ++y) report.targets.push_back(y);

  EvaluationSetup eval;
  eval.calendar = setup.calendar;
  eval.bounds = setup.bounds;
  const auto counties = build_prediction_matrices(batch.db, report.targets, benchmark_weather(data), soil, eval, workers);

  for (MapeLevel level : {MapeLevel::Field, MapeLevel::County}) {
    auto& table = level == report.level ? report.mape : report.county_mape;
    for (Strategy st : {Strategy::Quality, Strategy::Mean, Strategy::PreviousYear}) {
      table[st] = strategy_mape(counties, st, report.targets, level);
    }
    table[Strategy::AllPrevious] = all_previous_mape(counties, report.targets, level, seeds);
  }

  const int longest = std::min(6, config.last_year - config.first_year);
  for (int y = config.first_year + longest; y <= config.last_year; ++y) report.history_targets.push_back(y);
  for (int h = 2; h <= longest; ++h) {
    RegionOptions o;
    o.history = h;
    report.quality_by_history[h] =
        strategy_mape(counties, Strategy::Quality, report.history_targets, report.level, o);
  }
  report.db = std::move(batch.db);
  return report;
}

}  // namespace cropforge
