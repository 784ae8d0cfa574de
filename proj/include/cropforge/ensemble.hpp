#pragma once

// Yield prediction for a target year from models calibrated in earlier
// years. Y_d(y_x, y_k) is the yield predicted for year y_k by the model
// calibrated on year y_x.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace cropforge {

using YearlyValues = std::map<int, double>;

class PredictionMatrix {
 public:
  /// Requires calibration_year < evaluation_year.
  void set(int calibration_year, int evaluation_year, double prediction);
  std::optional<double> get(int calibration_year, int evaluation_year) const;
  bool empty() const noexcept { return values_.empty(); }

  /// Calibration years y_x < target that have a prediction for target.
  std::vector<int> prior_years(int target) const;

  /// Copy keeping only calibration years >= target - history.
  PredictionMatrix restricted_to_history(int target, int history) const;

  const std::map<std::pair<int, int>, double>& values() const noexcept { return values_; }

 private:
  std::map<std::pair<int, int>, double> values_;
};

enum class Strategy { AllPrevious, PreviousYear, Mean, Quality };

std::string_view strategy_name(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

/// Y_d(y_x, target) for one seeded-uniform prior year y_x. The pick depends
/// only on (seed, target, set of prior years).
double ensemble_all_previous(const PredictionMatrix& m, int target, std::uint64_t seed);
/// Index into prior_years(target) chosen by ensemble_all_previous.
std::size_t all_previous_choice(std::size_t prior_count, int target, std::uint64_t seed);

double ensemble_previous_year(const PredictionMatrix& m, int target);
double ensemble_mean(const PredictionMatrix& m, int target);

/// Mean |Y_d(j,k) - O(k)| / O(k) over j < k < target with both a prediction
/// and an observation; nullopt when no such k exists.
std::optional<double> quality_score(const PredictionMatrix& m, int calibration_year, int target,
                                    const YearlyValues& observed);

enum class QualityWeighting {
  InverseQ,  // w_j = 1 / max(Q_j, eps)
  LiteralQ,  // w_j = Q_j, as the weighted sum is printed
};

struct QualityOptions {
  QualityWeighting weighting = QualityWeighting::InverseQ;
  double epsilon = 1e-6;
};

struct QualityMember {
  int year = 0;
  double prediction = 0.0;
  double q = 0.0;
  double weight = 0.0;
};

/// Members j in [target-n, target-2] with a defined Q and their weights.
std::vector<QualityMember> quality_members(const PredictionMatrix& m, int target,
                                           const YearlyValues& observed,
                                           const QualityOptions& options = {});

double ensemble_quality(const PredictionMatrix& m, int target, const YearlyValues& observed,
                        const QualityOptions& options = {});

double ensemble_predict(Strategy s, const PredictionMatrix& m, int target,
                        const YearlyValues& observed, std::uint64_t seed,
                        const QualityOptions& options = {});

struct RegionPrediction {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::vector<double> field_predictions;
};

RegionPrediction aggregate_region(std::span<const double> field_predictions);

}  // namespace cropforge
