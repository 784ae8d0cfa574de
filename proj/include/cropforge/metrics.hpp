#pragma once

#include <span>
#include <utility>
#include <vector>

namespace cropforge {

/// Predicted values S against observed values O, same length.
struct PairedSeries {
  std::span<const double> predicted;
  std::span<const double> observed;
};

/// Product-moment correlation (population moments). Throws if either side
/// has zero variance.
double pearson(const PairedSeries& s);
/// (1/n) sum |s_i - o_i| / o_i, as a fraction. Requires every o_i > 0.
double mape(const PairedSeries& s);
/// sqrt(mean (s_i - o_i)^2) / mean(o). Requires mean(o) > 0.
double prmse(const PairedSeries& s);
/// 1 - SS_res / SS_tot. Requires non-constant observations.
double r_squared(const PairedSeries& s);
/// sqrt(mean (s_i - o_i)^2) in the data's units.
double rmsep(const PairedSeries& s);

/// Standard normal CDF.
double normal_cdf(double x);
/// Standard normal quantile for p in (0,1): rational approximation refined
/// with one Halley step.
double normal_quantile(double p);

struct GaussianForecast {
  double mu = 0.0;
  double sigma = 1.0;
};

struct ReliabilityPoint {
  double nominal = 0.0;
  double empirical = 0.0;
};

/// For each level p, the fraction of observations y_i <= mu_i + sigma_i * z_p.
std::vector<ReliabilityPoint> reliability_curve(std::span<const GaussianForecast> forecasts,
                                                std::span<const double> observed,
                                                std::span<const double> levels);

/// 0.1, 0.2, ..., 0.9
std::vector<double> decile_levels();

}  // namespace cropforge
