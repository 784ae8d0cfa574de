#include "cropforge/crop_model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include <json.hpp>

#include "cropforge/error.hpp"
#include "cropforge/io.hpp"

namespace cropforge {

namespace {

std::atomic<std::uint64_t> g_simulation_calls{0};

}  // namespace

const std::vector<CoefficientBound>& default_genetic_bounds() {
  static const std::vector<CoefficientBound> table = {
      {"gdd_vegetative", 450.0, 650.0, "degC.day"},
      {"gdd_flowering", 125.0, 225.0, "degC.day"},
      {"gdd_grain_fill", 350.0, 550.0, "degC.day"},
      {"base_temperature", 7.0, 11.0, "degC"},
      {"rue", 1.75, 2.95, "g/MJ"},
      {"lai_max", 3.6, 6.4, "m2/m2"},
      {"lai_growth_rate", 0.008, 0.018, "1/degC.day"},
      {"harvest_index", 0.39, 0.56, "fraction"},
      {"extinction", 0.5, 0.75, "unitless"},
      {"drought_sensitivity", 0.7, 1.8, "exponent"},
      {"temp_optimum_width", 10.0, 16.0, "degC"},
      {"senescence_rate", 0.0006, 0.0014, "1/degC.day"},
      {"emergence_lag", 50.0, 110.0, "degC.day"},
      {"max_root_uptake", 7.0, 11.0, "mm/day"},
      {"respiration_fraction", 0.08, 0.22, "fraction"},
      {"seed_fill_efficiency", 0.8, 0.95, "fraction"},
      {"planting_offset", -15.0, 15.0, "day"},
      {"harvest_offset", -15.0, 15.0, "day"},
  };
  return table;
}

std::vector<CoefficientBound> parse_genetic_bounds(std::string_view json_text) {
  using nlohmann::json;
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string("genetics bounds: ") + e.what());
  }
  if (!root.is_object() || !root.contains("coefficients") || !root["coefficients"].is_array()) {
    throw ParseError("genetics bounds: expected an object with a 'coefficients' array");
  }
  if (root.contains("version") &&
      (!root["version"].is_number_integer() || root["version"].get<int>() != kBoundsTableVersion)) {
    throw ParseError("genetics bounds: unsupported version");
  }
  std::vector<CoefficientBound> out;
  for (const json& c : root["coefficients"]) {
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string() || !c.contains("lo") ||
        !c["lo"].is_number() || !c.contains("hi") || !c["hi"].is_number()) {
      throw ParseError("genetics bounds: each coefficient needs name, lo, hi");
    }
    CoefficientBound b;
    b.name = c["name"].get<std::string>();
    b.lo = c["lo"].get<double>();
    b.hi = c["hi"].get<double>();
    if (c.contains("unit") && c["unit"].is_string()) b.unit = c["unit"].get<std::string>();
    if (!(b.lo < b.hi)) throw ValidationError("genetics bounds: lo >= hi for " + b.name);
    out.push_back(std::move(b));
  }
  return out;
}

std::string write_genetic_bounds(std::span<const CoefficientBound> bounds) {
  std::string out = "{\n  \"version\": " + std::to_string(kBoundsTableVersion) +
                    ",\n  \"coefficients\": [\n";
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto& b = bounds[i];
    out += "    {\"name\": " + nlohmann::json(b.name).dump() + ", \"lo\": " + format_number(b.lo) +
           ", \"hi\": " + format_number(b.hi) + ", \"unit\": " + nlohmann::json(b.unit).dump() + "}";
    out += i + 1 < bounds.size() ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

void GeneticCoefficients::validate() const {
  if (values.size() != bounds.size()) {
    throw ValidationError("genetic coefficients: " + std::to_string(values.size()) +
                          " values for " + std::to_string(bounds.size()) + " bounds");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(bounds[i].lo < bounds[i].hi)) {
      throw ValidationError("genetic coefficients: lo >= hi for " + bounds[i].name);
    }
    if (!(values[i] >= 0.0 && values[i] <= 1.0)) {
      throw ValidationError("genetic coefficient " + bounds[i].name + " outside [0,1]");
    }
  }
}

GeneticCoefficients midpoint_coefficients(const std::vector<CoefficientBound>& bounds) {
  return {std::vector<double>(bounds.size(), 0.5), bounds};
}

std::vector<double> map_coefficients(const GeneticCoefficients& g) {
  if (g.values.size() != g.bounds.size()) {
    throw ValidationError("genetic coefficients: values/bounds size mismatch");
  }
  std::vector<double> out(g.values.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& b = g.bounds[i];
    out[i] = b.lo + g.values[i] * (b.hi - b.lo);
  }
  return out;
}

CropParameters CropParameters::from_physical(std::span<const double> p) {
  if (p.size() != kGeneticDimension) {
    throw ValidationError("simulator needs " + std::to_string(kGeneticDimension) +
                          " coefficients, got " + std::to_string(p.size()));
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i])) {
      throw NumericError("coefficient g" + std::to_string(i + 1) + " is not finite after mapping");
    }
  }
  CropParameters c;
  c.gdd_vegetative = p[0];
  c.gdd_flowering = p[1];
  c.gdd_grain_fill = p[2];
  c.base_temperature = p[3];
  c.rue = p[4];
  c.lai_max = p[5];
  c.lai_growth_rate = p[6];
  c.harvest_index = p[7];
  c.extinction = p[8];
  c.drought_sensitivity = p[9];
  c.temp_optimum_width = p[10];
  c.senescence_rate = p[11];
  c.emergence_lag = p[12];
  c.max_root_uptake = p[13];
  c.respiration_fraction = p[14];
  c.seed_fill_efficiency = p[15];
  c.planting_offset_days = p[16];
  c.harvest_offset_days = p[17];
  return c;
}

void ManagementPlan::validate() const {
  if (!(initial_soil_water_fraction >= 0.0 && initial_soil_water_fraction <= 1.0)) {
    throw ValidationError("initial soil water fraction must be in [0,1]");
  }
  if (harvest && !(planting < *harvest)) {
    throw ValidationError("harvest must be strictly after planting");
  }
}

double gdd_day(double tmax, double tmin, double tbase) {
  if (tmax < tmin) throw ValidationError("gdd_day: tmax < tmin");
  return std::max(0.0, 0.5 * (tmax + tmin) - tbase);
}

std::optional<std::size_t> find_weather_day(const WeatherSeries& weather, Date date) {
  const auto& recs = weather.records;
  const auto it = std::lower_bound(recs.begin(), recs.end(), date,
                                   [](const WeatherRecord& r, Date d) { return r.date() < d; });
  if (it == recs.end() || it->date() != date) return std::nullopt;
  return static_cast<std::size_t>(it - recs.begin());
}

std::vector<double> accumulate_gdd(const WeatherSeries& series, double tbase, Date start, Date end) {
  std::vector<double> out;
  if (end < start) return out;
  const auto first = find_weather_day(series, start);
  if (!first) throw ValidationError("accumulate_gdd: window start " + date_label(start.year, start.doy) + " not covered");
  double sum = 0.0;
  Date expected = start;
  for (std::size_t i = *first; i < series.records.size(); ++i) {
    const WeatherRecord& r = series.records[i];
    if (r.date() != expected) {
      throw ValidationError("accumulate_gdd: weather gap before " + date_label(expected.year, expected.doy));
    }
    sum += gdd_day(r.tmax, r.tmin, tbase);
    out.push_back(sum);
    if (r.date() == end) return out;
    expected = next_day(expected);
  }
  throw ValidationError("accumulate_gdd: window end " + date_label(end.year, end.doy) + " not covered");
}

double soil_water_capacity_mm(const SoilProfile& soil) {
  const double paw_fraction = 0.05 + 0.001 * soil.mean_clay();
  return paw_fraction * model_constants::kRootDepthMm;
}

std::uint64_t simulation_call_count() noexcept {
  return g_simulation_calls.load(std::memory_order_relaxed);
}

SimulationOutput simulate(const ManagementPlan& plan, const WeatherSeries& weather,
                          const GeneticCoefficients& genetics, const SoilProfile& soil) {
  namespace mc = model_constants;
  g_simulation_calls.fetch_add(1, std::memory_order_relaxed);

  plan.validate();
  genetics.validate();
  const std::vector<double> physical = map_coefficients(genetics);
  const CropParameters g = CropParameters::from_physical(physical);

  const auto first = find_weather_day(weather, plan.planting);
  if (!first) {
    throw ValidationError("weather does not cover planting date " +
                          date_label(plan.planting.year, plan.planting.doy));
  }

  const double flowering_at = g.emergence_lag + g.gdd_vegetative;
  const double fill_start_at = flowering_at + g.gdd_flowering;
  const double maturity_at = fill_start_at + g.gdd_grain_fill;

  const double capacity = soil_water_capacity_mm(soil);
  double water = plan.initial_soil_water_fraction * capacity;

  SimulationOutput out;
  out.start = plan.planting;
  double thermal = 0.0;
  double lai = 0.0;
  bool emerged = false;
  bool filling = false;
  double lai_at_fill_start = 0.0;
  double fill_thermal = 0.0;
  double biomass = 0.0;       // g/m2
  double fill_biomass = 0.0;  // g/m2

  Date expected = plan.planting;
  for (std::size_t i = *first; i < weather.records.size(); ++i) {
    const WeatherRecord& w = weather.records[i];
    if (w.date() != expected) {
      throw ValidationError("weather gap before " + date_label(expected.year, expected.doy));
    }

    const double tmean = 0.5 * (w.tmax + w.tmin);
    const double gdd = gdd_day(w.tmax, w.tmin, g.base_temperature);
    thermal += gdd;

    // Interception uses the canopy present at the start of the day.
    const double par_intercepted = mc::kParFraction * w.srad * (1.0 - std::exp(-g.extinction * lai));
    const double dt = (tmean - mc::kOptimumTemperature) / g.temp_optimum_width;
    const double temp_factor = std::exp(-dt * dt);

    water = std::min(capacity, water + w.rain);
    const double demand = std::max(mc::kTranspirationPerPar * par_intercepted, mc::kDemandFloor);
    const double supply = std::min(water, capacity > 0.0 ? g.max_root_uptake * water / capacity : 0.0);
    const double stress = std::pow(std::min(1.0, supply / demand), g.drought_sensitivity);
    water -= std::min(demand, supply);

    const double growth = g.rue * par_intercepted * temp_factor * stress * (1.0 - g.respiration_fraction);
    biomass += growth;

    if (!emerged && thermal >= g.emergence_lag) {
      emerged = true;
      lai = mc::kLaiSeed;
    } else if (emerged && thermal < fill_start_at) {
      const double potential = g.lai_growth_rate * gdd * lai * (1.0 - lai / g.lai_max);
      const double carbon_limited = mc::kSpecificLeafArea * mc::kLeafPartition * growth;
      lai = std::min(g.lai_max, lai + std::min(potential, carbon_limited));
    }
    if (thermal >= fill_start_at) {
      if (!filling) {
        filling = true;
        lai_at_fill_start = lai;
      }
      fill_thermal += gdd;
      fill_biomass += growth;
      lai = std::max(0.0, lai_at_fill_start * (1.0 - g.senescence_rate * fill_thermal));
    }

    out.lai_series.push_back(lai);
    out.biomass_series.push_back(biomass * mc::kGramsPerM2ToKgPerHa);

    if (thermal >= maturity_at) {
      out.maturity_doy = w.doy;
      break;
    }
    if (plan.harvest && w.date() == *plan.harvest) break;
    expected = next_day(expected);
    if (i + 1 == weather.records.size() && plan.harvest) {
      throw ValidationError("weather does not cover harvest date " +
                            date_label(plan.harvest->year, plan.harvest->doy));
    }
  }

  out.yield_kg_ha = g.harvest_index * g.seed_fill_efficiency * fill_biomass * mc::kGramsPerM2ToKgPerHa;
  if (!std::isfinite(out.yield_kg_ha)) throw NumericError("simulated yield is not finite");
  return out;
}

}  // namespace cropforge
