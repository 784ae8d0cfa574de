#include "cropforge/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cropforge/error.hpp"
#include "cropforge/rng.hpp"

namespace cropforge {

void PredictionMatrix::set(int calibration_year, int evaluation_year, double prediction) {
  if (!(calibration_year < evaluation_year)) {
    throw ValidationError("prediction matrix: calibration year " + std::to_string(calibration_year) +
                          " must precede evaluation year " + std::to_string(evaluation_year));
  }
  if (!std::isfinite(prediction)) throw ValidationError("prediction matrix: non-finite prediction");
  values_[{calibration_year, evaluation_year}] = prediction;
}

std::optional<double> PredictionMatrix::get(int calibration_year, int evaluation_year) const {
  const auto it = values_.find({calibration_year, evaluation_year});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> PredictionMatrix::prior_years(int target) const {
  std::vector<int> years;
  for (const auto& [key, value] : values_) {
    if (key.second == target && key.first < target) years.push_back(key.first);
  }
  return years;  // map order: ascending
}

PredictionMatrix PredictionMatrix::restricted_to_history(int target, int history) const {
  PredictionMatrix out;
  for (const auto& [key, value] : values_) {
    if (key.first >= target - history) out.values_.insert({key, value});
  }
  return out;
}

std::string_view strategy_name(Strategy s) noexcept {
  switch (s) {
    case Strategy::AllPrevious:
      return "all-previous";
    case Strategy::PreviousYear:
      return "previous-year";
    case Strategy::Mean:
      return "mean";
    case Strategy::Quality:
      return "quality";
  }
  return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
  for (Strategy s : {Strategy::AllPrevious, Strategy::PreviousYear, Strategy::Mean, Strategy::Quality}) {
    if (strategy_name(s) == name) return s;
  }
  return std::nullopt;
}

std::size_t all_previous_choice(std::size_t prior_count, int target, std::uint64_t seed) {
  Rng rng(hash64({seed, static_cast<std::uint64_t>(target), prior_count}));
  return static_cast<std::size_t>(rng.below(prior_count));
}

double ensemble_all_previous(const PredictionMatrix& m, int target, std::uint64_t seed) {
  const auto years = m.prior_years(target);
  if (years.empty()) {
    throw ValidationError("all-previous: no calibration year before " + std::to_string(target));
  }
  return *m.get(years[all_previous_choice(years.size(), target, seed)], target);
}

double ensemble_previous_year(const PredictionMatrix& m, int target) {
  const auto v = m.get(target - 1, target);
  if (!v) {
    throw ValidationError("previous-year: no model calibrated on " + std::to_string(target - 1));
  }
  return *v;
}

double ensemble_mean(const PredictionMatrix& m, int target) {
  const auto years = m.prior_years(target);
  if (years.empty()) throw ValidationError("mean: no calibration year before " + std::to_string(target));
  double sum = 0.0;
  for (int y : years) sum += *m.get(y, target);
  return sum / static_cast<double>(years.size());
}

std::optional<double> quality_score(const PredictionMatrix& m, int calibration_year, int target,
                                    const YearlyValues& observed) {
  double sum = 0.0;
  std::size_t count = 0;
  for (int k = calibration_year + 1; k < target; ++k) {
    const auto pred = m.get(calibration_year, k);
    const auto obs = observed.find(k);
    if (!pred || obs == observed.end()) continue;
    if (!(obs->second > 0.0)) throw ValidationError("observed yield must be > 0");
    sum += std::abs(*pred - obs->second) / obs->second;
    ++count;
  }
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

std::vector<QualityMember> quality_members(const PredictionMatrix& m, int target,
                                           const YearlyValues& observed, const QualityOptions& options) {
  const auto years = m.prior_years(target);
  if (years.size() < 2) {
    throw ValidationError("quality: needs at least 2 prior calibration years (have " +
                          std::to_string(years.size()) + "); use mean or previous-year instead");
  }
  std::vector<QualityMember> members;
  for (int j : years) {
    if (j > target - 2) continue;
    const auto q = quality_score(m, j, target, observed);
    if (!q) continue;
    QualityMember member{j, *m.get(j, target), *q, 0.0};
    member.weight = options.weighting == QualityWeighting::InverseQ
                        ? 1.0 / std::max(*q, options.epsilon)
                        : *q;
    members.push_back(member);
  }
  if (members.empty()) {
    throw ValidationError("quality: no prior model has a scored year before " + std::to_string(target));
  }
  return members;
}

double ensemble_quality(const PredictionMatrix& m, int target, const YearlyValues& observed,
                        const QualityOptions& options) {
  const auto members = quality_members(m, target, observed, options);
  double num = 0.0;
  double den = 0.0;
  for (const auto& mem : members) {
    num += mem.weight * mem.prediction;
    den += mem.weight;
  }
  if (!(den > 0.0)) {
    // LiteralQ with every Q == 0: fall back to equal weights.
    double sum = 0.0;
    for (const auto& mem : members) sum += mem.prediction;
    return sum / static_cast<double>(members.size());
  }
  return num / den;
}

double ensemble_predict(Strategy s, const PredictionMatrix& m, int target,
                        const YearlyValues& observed, std::uint64_t seed, const QualityOptions& options) {
  switch (s) {
    case Strategy::AllPrevious:
      return ensemble_all_previous(m, target, seed);
    case Strategy::PreviousYear:
      return ensemble_previous_year(m, target);
    case Strategy::Mean:
      return ensemble_mean(m, target);
    case Strategy::Quality:
      return ensemble_quality(m, target, observed, options);
  }
  throw ValidationError("unknown strategy");
}

RegionPrediction aggregate_region(std::span<const double> field_predictions) {
  if (field_predictions.empty()) throw ValidationError("aggregate_region: no field predictions");
  RegionPrediction out;
  out.field_predictions.assign(field_predictions.begin(), field_predictions.end());
  double sum = 0.0;
  for (double v : field_predictions) sum += v;
  const double n = static_cast<double>(field_predictions.size());
  out.mean = sum / n;
  double ss = 0.0;
  for (double v : field_predictions) ss += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(ss / n);
  // Keep the mean inside the member range despite rounding.
  const auto [lo, hi] = std::minmax_element(field_predictions.begin(), field_predictions.end());
  out.mean = std::clamp(out.mean, *lo, *hi);
  return out;
}

}  // namespace cropforge
