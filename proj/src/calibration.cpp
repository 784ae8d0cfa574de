#include "cropforge/calibration.hpp"

#include <cmath>
#include <mutex>

#include "cropforge/error.hpp"
#include "cropforge/parallel.hpp"
#include "cropforge/rng.hpp"

namespace cropforge {

void CostWeights::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw ValidationError("cost weights must be >= 0");
  if (!(alpha + beta > 0.0)) throw ValidationError("alpha + beta must be > 0");
}

double calibration_cost(double sim_yield, double measured_yield, std::optional<double> lai_rmse_value,
                        std::optional<double> mean_lai, const CostWeights& weights) {
  weights.validate();
  if (!(measured_yield > 0.0)) throw ValidationError("measured yield must be > 0");
  double cost = weights.alpha * std::abs(sim_yield - measured_yield) / measured_yield;
  if (weights.beta > 0.0) {
    if (!lai_rmse_value || !mean_lai) {
      throw ValidationError("beta > 0 requires an LAI reference series");
    }
    if (!(*mean_lai > 0.0)) throw ValidationError("mean reference LAI must be > 0");
    cost += weights.beta * *lai_rmse_value / *mean_lai;
  }
  return cost;
}

ManagementPlan plan_for_season(const SeasonCalendar& calendar, int year,
                               const GeneticCoefficients& genetics) {
  const std::vector<double> physical = map_coefficients(genetics);
  const CropParameters params = CropParameters::from_physical(physical);
  ManagementPlan plan;
  plan.initial_soil_water_fraction = calendar.initial_soil_water_fraction;
  plan.planting = add_days({year, calendar.planting_doy},
                           static_cast<int>(std::lround(params.planting_offset_days)));
  if (!calendar.harvest_at_maturity) {
    plan.harvest = add_days({year, calendar.harvest_doy},
                            static_cast<int>(std::lround(params.harvest_offset_days)));
  }
  return plan;
}

std::uint64_t field_seed(const YieldRecord& record, std::uint64_t base_seed) {
  const auto lat = static_cast<std::int64_t>(std::llround(record.lat * 1e4));
  const auto lon = static_cast<std::int64_t>(std::llround(record.lon * 1e4));
  return hash64({static_cast<std::uint64_t>(record.year), static_cast<std::uint64_t>(lat),
                 static_cast<std::uint64_t>(lon), base_seed});
}

double lai_rmse(const std::vector<double>& simulated, const std::vector<double>& reference) {
  const std::size_t n = std::min(simulated.size(), reference.size());
  if (n == 0) throw ValidationError("LAI RMSE needs overlapping series");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = simulated[i] - reference[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(n));
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

CalibrationEntry calibrate_field(const FieldObservation& obs, const CalibrationSetup& setup) {
  setup.weights.validate();
  setup.pso.validate();
  const double measured = obs.record.yield_kg_ha;
  if (!(measured > 0.0)) throw ValidationError("measured yield must be > 0");
  std::optional<double> mean_lai;
  if (setup.weights.beta > 0.0) {
    if (!obs.lai_reference || obs.lai_reference->empty()) {
      throw ValidationError("beta > 0 requires an LAI reference series for every field");
    }
    mean_lai = mean_of(*obs.lai_reference);
  }

  GeneticCoefficients genetics{std::vector<double>(setup.bounds.size(), 0.5), setup.bounds};
  const Objective objective = [&](std::span<const double> x) {
    genetics.values.assign(x.begin(), x.end());
    const ManagementPlan plan = plan_for_season(setup.calendar, obs.record.year, genetics);
    const SimulationOutput sim = simulate(plan, obs.weather, genetics, obs.soil);
    std::optional<double> rmse;
    if (mean_lai) rmse = lai_rmse(sim.lai_series, *obs.lai_reference);
    return calibration_cost(sim.yield_kg_ha, measured, rmse, mean_lai, setup.weights);
  };

  PsoConfig pso = setup.pso;
  pso.seed = field_seed(obs.record, setup.pso.seed);
  const PsoResult best = pso_minimize(objective, setup.bounds.size(), pso);

  CalibrationEntry entry;
  entry.calibration_values = best.best_position;
  entry.calibration_cost = best.best_cost;
  entry.latitude = obs.record.lat;
  entry.longitude = obs.record.lon;
  entry.measured_yield = measured;
  return entry;
}

BatchResult calibrate_batch(const std::vector<FieldObservation>& observations,
                            const CalibrationSetup& setup, std::size_t workers,
                            const ProgressSink& progress) {
  if (workers < 1) throw ValidationError("parallelism must be >= 1");
  std::vector<std::optional<CalibrationEntry>> results(observations.size());
  std::mutex progress_mutex;
  const auto errors = parallel_for(observations.size(), workers, [&](std::size_t i) {
    try {
      results[i] = calibrate_field(observations[i], setup);
    } catch (...) {
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(i, observations[i], std::nullopt);
      }
      throw;
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(i, observations[i], results[i]);
    }
  });

  BatchResult out;
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const YieldRecord& rec = observations[i].record;
    if (errors[i]) {
      FieldFailure f{i, rec.county, rec.year, "unknown error"};
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& e) {
        f.message = e.what();
      } catch (...) {
      }
      out.failures.push_back(std::move(f));
      continue;
    }
    out.db[rec.county][rec.year].push_back(*results[i]);
  }
  if (!observations.empty() && out.failures.size() == observations.size()) {
    throw Error("all " + std::to_string(observations.size()) +
                " fields failed to calibrate; first error: " + out.failures.front().message);
  }
  return out;
}

}  // namespace cropforge
