#pragma once

// Evaluation service: runs every calibrated field model once per evaluation
// year and groups the results into per-field prediction matrices.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cropforge/calibration.hpp"
#include "cropforge/crop_model.hpp"
#include "cropforge/ensemble.hpp"
#include "cropforge/types.hpp"

namespace cropforge {

struct EvaluationSetup {
  SeasonCalendar calendar;
  std::vector<CoefficientBound> bounds = default_genetic_bounds();
};

/// One simulate() call with the entry's coefficients on `target_year`.
double evaluate_entry(const CalibrationEntry& entry, int target_year, const WeatherSeries& weather,
                      const SoilProfile& soil, const EvaluationSetup& setup);

/// Weather covering a field's seasons, looked up by county and location.
using WeatherLookup =
    std::function<const WeatherSeries&(const std::string& county, double lat, double lon)>;

struct FieldMatrix {
  std::int64_t lat_e4 = 0;
  std::int64_t lon_e4 = 0;
  PredictionMatrix matrix;
  /// The field's own measured yield per calibrated year; scores its models.
  YearlyValues observed;
};

struct CountyMatrices {
  std::string county;
  std::vector<FieldMatrix> fields;  // sorted by (lat_e4, lon_e4)
  /// Measured yield per calibrated year (mean over the county's entries).
  YearlyValues observed;
};

/// For every entry calibrated on y_x, predicts each year in
/// `evaluation_years` greater than y_x. Fields are matched across years by
/// location rounded to 1e-4 degrees.
std::vector<CountyMatrices> build_prediction_matrices(const CalibrationDB& db,
                                                      std::span<const int> evaluation_years,
                                                      const WeatherLookup& weather,
                                                      const SoilProfile& soil,
                                                      const EvaluationSetup& setup,
                                                      std::size_t workers);

struct RegionOptions {
  std::uint64_t seed = 0;
  QualityOptions quality;
  /// Use only calibration years >= target - history.
  std::optional<int> history;
};

/// Applies `strategy` per field (quality scores use the field's own
/// observations) and aggregates. Fields lacking the data the
/// strategy needs are skipped; throws ValidationError if none qualify.
RegionPrediction predict_region(const CountyMatrices& county, Strategy strategy, int target,
                                const RegionOptions& options = {});

}  // namespace cropforge
