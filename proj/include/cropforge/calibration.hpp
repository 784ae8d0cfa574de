#pragma once

// Inversion of genetic coefficients from measured yields.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cropforge/crop_model.hpp"
#include "cropforge/pso.hpp"
#include "cropforge/types.hpp"

namespace cropforge {

struct CostWeights {
  double alpha = 1.0;  // yield importance
  double beta = 0.0;   // LAI importance

  void validate() const;
};

/// C = alpha*|Y_sim - Y_meas|/Y_meas + beta*RMSE_LAI/mu_LAI.
/// `lai_rmse`/`mean_lai` are ignored when beta == 0.
double calibration_cost(double sim_yield, double measured_yield, std::optional<double> lai_rmse,
                        std::optional<double> mean_lai, const CostWeights& weights);

/// Nominal regional crop calendar; the calibrated g17/g18 coefficients shift
/// planting and harvest around it.
struct SeasonCalendar {
  int planting_doy = 130;
  int harvest_doy = 290;
  bool harvest_at_maturity = false;
  double initial_soil_water_fraction = 1.0;
};

/// Management plan for `year` with the date offsets carried in `genetics`
/// (coefficients 17 and 18, rounded to whole days).
ManagementPlan plan_for_season(const SeasonCalendar& calendar, int year,
                               const GeneticCoefficients& genetics);

struct FieldObservation {
  YieldRecord record;
  WeatherSeries weather;
  SoilProfile soil;
  /// Daily LAI aligned with the first simulated day.
  std::optional<std::vector<double>> lai_reference;
};

struct CalibrationSetup {
  CostWeights weights;
  PsoConfig pso;  // pso.seed acts as the base seed
  SeasonCalendar calendar;
  std::vector<CoefficientBound> bounds = default_genetic_bounds();
};

/// hash64(year, round(lat*1e4), round(lon*1e4), base_seed)
std::uint64_t field_seed(const YieldRecord& record, std::uint64_t base_seed);

/// RMSE between simulated and reference LAI over their common prefix.
double lai_rmse(const std::vector<double>& simulated, const std::vector<double>& reference);

CalibrationEntry calibrate_field(const FieldObservation& obs, const CalibrationSetup& setup);

struct FieldFailure {
  std::size_t index = 0;
  std::string county;
  int year = 0;
  std::string message;
};

struct BatchResult {
  CalibrationDB db;
  std::vector<FieldFailure> failures;
};

/// Called once per finished field (from worker threads, serialized).
using ProgressSink = std::function<void(std::size_t index, const FieldObservation&,
                                        const std::optional<CalibrationEntry>&)>;

/// Calibrates every observation on `workers` threads. Entries are grouped by
/// (county, year) in input order. Throws only if every field failed.
BatchResult calibrate_batch(const std::vector<FieldObservation>& observations,
                            const CalibrationSetup& setup, std::size_t workers,
                            const ProgressSink& progress = {});

}  // namespace cropforge
