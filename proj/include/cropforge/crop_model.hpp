#pragma once

// Simplified daily-step crop simulator behind the crop-simulation wrapper
// contract: management + weather + genetics + soil in; yield, LAI and
// biomass series out. The equations are documented in docs/crop_model.md.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cropforge/types.hpp"

namespace cropforge {

struct CoefficientBound {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::string unit;

  bool operator==(const CoefficientBound&) const = default;
};

/// Number of cultivar coefficients used by the simulator.
inline constexpr std::size_t kGeneticDimension = 18;

/// Built-in bounds table; identical to data/genetics_bounds.json.
const std::vector<CoefficientBound>& default_genetic_bounds();
inline constexpr int kBoundsTableVersion = 1;

std::vector<CoefficientBound> parse_genetic_bounds(std::string_view json_text);
std::string write_genetic_bounds(std::span<const CoefficientBound> bounds);

struct GeneticCoefficients {
  std::vector<double> values;  // normalized, each in [0,1]
  std::vector<CoefficientBound> bounds;

  /// Throws ValidationError when sizes differ, lo >= hi, or a value is
  /// outside [0,1].
  void validate() const;
};

GeneticCoefficients midpoint_coefficients(const std::vector<CoefficientBound>& bounds);

/// physical_i = lo_i + values_i * (hi_i - lo_i)
std::vector<double> map_coefficients(const GeneticCoefficients& genetics);

/// Physical cultivar parameters in simulator order (g1..g18).
struct CropParameters {
  double gdd_vegetative = 0.0;        // g1  emergence -> flowering, degC.day
  double gdd_flowering = 0.0;         // g2  flowering -> grain fill
  double gdd_grain_fill = 0.0;        // g3  grain fill duration
  double base_temperature = 0.0;      // g4  degC
  double rue = 0.0;                   // g5  g/MJ
  double lai_max = 0.0;               // g6  m2/m2
  double lai_growth_rate = 0.0;       // g7  per degC.day
  double harvest_index = 0.0;         // g8
  double extinction = 0.0;            // g9
  double drought_sensitivity = 0.0;   // g10 exponent on supply/demand
  double temp_optimum_width = 0.0;    // g11 degC
  double senescence_rate = 0.0;       // g12 fraction of fill-start LAI per degC.day
  double emergence_lag = 0.0;         // g13 degC.day sowing -> emergence
  double max_root_uptake = 0.0;       // g14 mm/day at field capacity
  double respiration_fraction = 0.0;  // g15
  double seed_fill_efficiency = 0.0;  // g16
  double planting_offset_days = 0.0;  // g17
  double harvest_offset_days = 0.0;   // g18

  static CropParameters from_physical(std::span<const double> physical);
};

/// Fixed constants of the daily model.
namespace model_constants {
inline constexpr double kLaiSeed = 0.2;             // m2/m2 at emergence
inline constexpr double kParFraction = 0.5;          // PAR share of SRAD
inline constexpr double kOptimumTemperature = 25.0;  // degC
inline constexpr double kSpecificLeafArea = 0.025;   // m2 leaf per g biomass
inline constexpr double kLeafPartition = 0.45;       // share of new biomass to leaves
inline constexpr double kTranspirationPerPar = 0.2; // mm water per MJ intercepted PAR
inline constexpr double kRootDepthMm = 1000.0;
inline constexpr double kDemandFloor = 1e-9;         // mm
inline constexpr double kGramsPerM2ToKgPerHa = 10.0;
}  // namespace model_constants

struct ManagementPlan {
  Date planting;
  std::optional<Date> harvest;  // nullopt: harvest at maturity
  double initial_soil_water_fraction = 1.0;

  void validate() const;
};

struct SimulationOutput {
  double yield_kg_ha = 0.0;
  std::vector<double> lai_series;
  std::vector<double> biomass_series;  // kg/ha
  std::optional<int> maturity_doy;
  Date start;  // first simulated day

  bool operator==(const SimulationOutput&) const = default;
};

/// max(0, (tmax+tmin)/2 - tbase). Throws ValidationError if tmax < tmin.
double gdd_day(double tmax, double tmin, double tbase);

/// Running growing-degree-day sum over the inclusive window [start, end].
/// An empty window (end < start) yields an empty vector.
std::vector<double> accumulate_gdd(const WeatherSeries& series, double tbase, Date start, Date end);

/// Soil plant-available water capacity for the 1 m root zone, mm.
double soil_water_capacity_mm(const SoilProfile& soil);

SimulationOutput simulate(const ManagementPlan& plan, const WeatherSeries& weather,
                          const GeneticCoefficients& genetics, const SoilProfile& soil);

/// Number of simulate() calls made by this process; instrumentation only.
std::uint64_t simulation_call_count() noexcept;

/// Index of `date` in `weather`, or nullopt.
std::optional<std::size_t> find_weather_day(const WeatherSeries& weather, Date date);

}  // namespace cropforge
