#pragma once

// Synthetic multi-year region for comparing ensemble strategies: field
// coefficients drift slowly from year to year, each county-year carries a
// small yield shock the simulator cannot explain, some field-seasons suffer
// a local loss event, and every field observation has measurement noise.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cropforge/calibration.hpp"
#include "cropforge/ensemble.hpp"
#include "cropforge/evaluation.hpp"
#include "cropforge/types.hpp"

namespace cropforge {

struct BenchmarkConfig {
  int first_year = 2010;
  int last_year = 2018;
  std::size_t counties = 3;
  std::size_t fields_per_county = 50;
  double county_spread = 0.15;       // normalized coefficient spread between counties
  double field_spread = 0.05;        // and between fields of one county
  double drift_per_year = 0.03;      // added to rue and harvest_index each year
  double year_shock_sd = 0.02;       // relative, shared by a county-year
  /// Local events the simulator cannot represent (hail, ponding, pests) cut
  /// a field's yield by U(0.5, 1) * anomaly_loss in a given season; models
  /// calibrated on such a season mispredict the others.
  double anomaly_probability = 0.2;
  double anomaly_loss = 0.5;
  double observation_noise_sd = 0.02;  // relative, per field
  double weather_year_sd = 0.04;     // relative spread of seasonal aggregates between years
  /// Calibration budget per field. Smaller than the default swarm: one yield
  /// number is matched long before 150 rounds.
  PsoConfig pso{20, 40};
  std::uint64_t seed = 2024;

  void validate() const;
};

struct BenchmarkData {
  SeasonCalendar calendar;
  SoilProfile soil;
  /// One observation per field and year, year-major; weather holds only that season.
  std::vector<FieldObservation> observations;
  /// All seasons of each field keyed by field_weather_stem().
  std::map<std::string, WeatherSeries> field_weather;
  /// Hidden truth (normalized) per observation.
  std::vector<std::vector<double>> truth;
};

BenchmarkData make_benchmark(const BenchmarkConfig& config, const SoilProfile& soil);

CalibrationSetup benchmark_calibration_setup(const BenchmarkConfig& config);

/// Looks fields up in `data.field_weather`.
WeatherLookup benchmark_weather(const BenchmarkData& data);

enum class MapeLevel {
  Field,   // each field's prediction against its own measured yield
  County,  // region mean against the county's mean measured yield
};

/// MAPE of `strategy` over `targets`, averaged over every scored (field or
/// county, target) pair. Pairs the strategy cannot serve are skipped; throws
/// if nothing is scored.
double strategy_mape(std::span<const CountyMatrices> counties, Strategy strategy, std::span<const int> targets,
                     MapeLevel level, const RegionOptions& options = {});

/// strategy_mape for AllPrevious averaged over seeds 0..seeds-1.
double all_previous_mape(std::span<const CountyMatrices> counties, std::span<const int> targets,
                         MapeLevel level, std::size_t seeds, const RegionOptions& options = {});

struct BenchmarkReport {
  MapeLevel level = MapeLevel::Field;
  std::map<Strategy, double> mape;  // AllPrevious averaged over `seeds`
  std::map<Strategy, double> county_mape;
  std::size_t seeds = 0;
  std::vector<int> targets;
  /// Quality MAPE by history length (prior calibration years used), scored
  /// on the targets that have the longest history available.
  std::map<int, double> quality_by_history;
  std::vector<int> history_targets;
  std::size_t calibrated = 0;
  std::size_t failed = 0;
  CalibrationDB db;
};

BenchmarkReport run_benchmark(const BenchmarkConfig& config, const SoilProfile& soil, std::size_t workers,
                              std::size_t seeds = 100);

}  // namespace cropforge
