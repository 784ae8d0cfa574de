#include "cropforge/evaluation.hpp"

#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "cropforge/error.hpp"
#include "cropforge/parallel.hpp"

namespace cropforge {

double evaluate_entry(const CalibrationEntry& entry, int target_year, const WeatherSeries& weather,
                      const SoilProfile& soil, const EvaluationSetup& setup) {
  const GeneticCoefficients genetics{entry.calibration_values, setup.bounds};
  const ManagementPlan plan = plan_for_season(setup.calendar, target_year, genetics);
  return simulate(plan, weather, genetics, soil).yield_kg_ha;
}

namespace {

struct Job {
  std::size_t county_index;
  std::size_t field_index;
  const CalibrationEntry* entry;
  int calibration_year;
  int evaluation_year;
};

}  // namespace

std::vector<CountyMatrices> build_prediction_matrices(const CalibrationDB& db,
                                                      std::span<const int> evaluation_years,
                                                      const WeatherLookup& weather,
                                                      const SoilProfile& soil,
                                                      const EvaluationSetup& setup,
                                                      std::size_t workers) {
  std::vector<CountyMatrices> out;
  std::vector<Job> jobs;
  for (const auto& [county, years] : db) {
    CountyMatrices cm;
    cm.county = county;
    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> field_index;
    // First pass: field slots in location order.
    for (const auto& [year, entries] : years) {
      for (const CalibrationEntry& e : entries) {
        field_index.emplace(std::pair{std::llround(e.latitude * 1e4), std::llround(e.longitude * 1e4)}, 0);
      }
    }
    std::size_t next = 0;
    for (auto& [key, idx] : field_index) {
      idx = next++;
      cm.fields.push_back({key.first, key.second, {}, {}});
    }
    for (const auto& [year, entries] : years) {
      double sum = 0.0;
      for (const CalibrationEntry& e : entries) {
        sum += e.measured_yield;
        const std::size_t f =
            field_index.at({std::llround(e.latitude * 1e4), std::llround(e.longitude * 1e4)});
        cm.fields[f].observed[year] = e.measured_yield;
        for (int target : evaluation_years) {
          if (target > year) jobs.push_back({out.size(), f, &e, year, target});
        }
      }
      cm.observed[year] = sum / static_cast<double>(entries.size());
    }
    out.push_back(std::move(cm));
  }

  std::vector<double> predictions(jobs.size());
  const auto errors = parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const Job& job = jobs[i];
    const std::string& county = out[job.county_index].county;
    const WeatherSeries& series = weather(county, job.entry->latitude, job.entry->longitude);
    predictions[i] = evaluate_entry(*job.entry, job.evaluation_year, series, soil, setup);
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    const Job& job = jobs[i];
    out[job.county_index].fields[job.field_index].matrix.set(job.calibration_year, job.evaluation_year,
                                                             predictions[i]);
  }
  return out;
}

RegionPrediction predict_region(const CountyMatrices& county, Strategy strategy, int target,
                                const RegionOptions& options) {
  std::vector<double> field_predictions;
  std::string last_error;
  for (const FieldMatrix& field : county.fields) {
    const PredictionMatrix matrix = options.history
                                        ? field.matrix.restricted_to_history(target, *options.history)
                                        : field.matrix;
    if (matrix.prior_years(target).empty()) continue;
    try {
      field_predictions.push_back(
          ensemble_predict(strategy, matrix, target, field.observed, options.seed, options.quality));
    } catch (const ValidationError& e) {
      last_error = e.what();
    }
  }
  if (field_predictions.empty()) {
    throw ValidationError(county.county + " " + std::to_string(target) + ": no field supports strategy " +
                          std::string(strategy_name(strategy)) +
                          (last_error.empty() ? std::string{} : " (" + last_error + ")"));
  }
  return aggregate_region(field_predictions);
}

}  // namespace cropforge
