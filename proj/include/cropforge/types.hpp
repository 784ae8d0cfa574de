#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cropforge {

/// Calendar day expressed as (year, day-of-year).
struct Date {
  int year = 0;
  int doy = 0;

  auto operator<=>(const Date&) const = default;
};

bool is_leap_year(int year) noexcept;
int days_in_year(int year) noexcept;
/// The day after `d`, rolling over into the next year.
Date next_day(Date d) noexcept;
/// `d` shifted by `days` (may be negative).
Date add_days(Date d, int days) noexcept;

struct WeatherRecord {
  int year = 0;
  int doy = 0;
  double srad = 0.0;  // MJ/m2/day
  double tmax = 0.0;  // degC
  double tmin = 0.0;  // degC
  double rain = 0.0;  // mm/day

  Date date() const noexcept { return {year, doy}; }
  bool operator==(const WeatherRecord&) const = default;
};

struct WeatherSeries {
  std::vector<WeatherRecord> records;
  std::string station_id;

  bool operator==(const WeatherSeries&) const = default;
};

/// Canonical SoilGrids depths in centimetres, one per profile layer.
inline constexpr std::array<int, 7> kSoilDepthsCm = {0, 5, 15, 30, 60, 100, 200};

struct SoilLayer {
  int depth_cm = 0;
  double clay = 0.0;              // %
  double silt = 0.0;              // %
  double sand = 0.0;              // %
  double bulk_density = 0.0;      // g/cm3
  double coarse_fragments = 0.0;  // %
  double cec = 0.0;               // cmol/kg
  double organic_carbon = 0.0;    // g/kg
  double ph_h2o = 0.0;
  double ph_kcl = 0.0;

  bool operator==(const SoilLayer&) const = default;
};

struct SoilProfile {
  std::vector<SoilLayer> layers;

  double mean_clay() const noexcept;
  bool operator==(const SoilProfile&) const = default;
};

struct YieldRecord {
  int year = 0;
  double lat = 0.0;
  double lon = 0.0;
  std::int64_t fips = 0;
  double yield_kg_ha = 0.0;
  std::string state;
  std::string county;

  bool operator==(const YieldRecord&) const = default;
};

struct CalibrationEntry {
  std::vector<double> calibration_values;
  double calibration_cost = 0.0;
  double latitude = 0.0;
  double longitude = 0.0;
  double measured_yield = 0.0;

  bool operator==(const CalibrationEntry&) const = default;
};

/// county -> year -> calibrated fields.
using CalibrationDB = std::map<std::string, std::map<int, std::vector<CalibrationEntry>>>;

/// Row-major sample matrix paired with simulated yields.
struct SurrogateDataset {
  std::size_t n_features = 0;
  std::vector<double> features;  // rows * n_features
  std::vector<double> yields;

  std::size_t rows() const noexcept { return yields.size(); }
  const double* row(std::size_t i) const noexcept { return features.data() + i * n_features; }

  bool operator==(const SurrogateDataset&) const = default;
};

}  // namespace cropforge
