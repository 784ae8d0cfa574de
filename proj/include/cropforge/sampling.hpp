#pragma once

// Surrogate training data: Sobol points over genetics + seasonal weather
// aggregates, daily weather synthesized from each point, one simulate() per row.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cropforge/crop_model.hpp"
#include "cropforge/sobol.hpp"
#include "cropforge/types.hpp"

namespace cropforge {

/// Weather aggregates, each given per sub-period of the season.
enum class WeatherAggregate { Tmax, Tmin, Srad, RainDepth, RainProbability };
inline constexpr std::size_t kWeatherAggregates = 5;
inline constexpr std::size_t kSeasonPeriods = 3;
inline constexpr std::size_t kWeatherParameters = kWeatherAggregates * kSeasonPeriods;

std::string_view aggregate_name(WeatherAggregate a) noexcept;

/// Base values of the 15 weather parameters, aggregate-major:
/// tmax_p1..p3, tmin_p1..p3, srad_p1..p3, rain_depth_p1..p3, rain_prob_p1..p3.
struct WeatherBase {
  std::array<double, kWeatherParameters> values{};

  double get(WeatherAggregate a, std::size_t period) const {
    return values[static_cast<std::size_t>(a) * kSeasonPeriods + period];
  }
};

/// Day-to-day spread of the synthesized weather.
struct WeatherNoise {
  double temperature_fraction = 0.1;  // sd = fraction * |mean|
  double srad_fraction = 0.1;
  double rain_fraction = 0.3;
};

struct ParameterRange {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
};

struct ParameterSpace {
  std::vector<CoefficientBound> genetic_bounds;
  WeatherBase weather_base;
  double variation = 0.15;  // weather range is base * (1 -/+ variation)
  WeatherNoise noise;

  std::size_t dimension() const noexcept { return genetic_bounds.size() + kWeatherParameters; }
  /// Genetics first (bounds order), then the weather parameters.
  std::vector<ParameterRange> ranges() const;
  void validate() const;
};

/// Built-in space; identical to data/weather_space.json with the default
/// genetics bounds.
ParameterSpace default_parameter_space();
/// Weather part of the space from JSON; genetics come from `bounds`.
ParameterSpace parse_parameter_space(std::string_view json_text, std::vector<CoefficientBound> bounds);
std::string write_weather_space(const ParameterSpace& space);

/// lo + u * (hi - lo) per coordinate.
std::vector<double> map_to_space(const ParameterSpace& space, std::span<const double> unit_point);
/// Next Sobol point mapped onto the space.
std::vector<double> sample_parameters(const ParameterSpace& space, SobolSequence& seq);

struct SeasonWindow {
  int year = 2018;
  int start_doy = 120;
  int length_days = 180;
  void validate() const;
};

/// Daily weather for the window. Sub-period k covers days
/// [k*len/3, (k+1)*len/3).
WeatherSeries synthesize_daily_weather(std::span<const double> weather_params, const SeasonWindow& season,
                                       std::uint64_t seed, const WeatherNoise& noise = {});

std::uint64_t row_seed(std::uint64_t seed, std::size_t row) noexcept;

/// Simulated yield for one physical parameter vector (genetics + weather).
double label_sample(const ParameterSpace& space, std::span<const double> physical, const SeasonWindow& season,
                    const SoilProfile& soil, std::uint64_t seed);

struct SampleFailure {
  std::size_t row = 0;
  std::string message;
};

struct DatasetResult {
  SurrogateDataset dataset;
  std::vector<SampleFailure> failures;
};

inline constexpr double kMaxFailureFraction = 0.05;

/// n Sobol points labeled in parallel; rows stay in Sobol order and failed
/// rows are dropped. Throws Error when more than 5% of rows fail.
DatasetResult generate_dataset(const ParameterSpace& space, std::size_t n, const SeasonWindow& season,
                               const SoilProfile& soil, std::uint64_t seed, std::size_t workers);

}  // namespace cropforge
