#include "cropforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cropforge/error.hpp"

namespace cropforge {

namespace {

void check_lengths(const PairedSeries& s, std::size_t min_len) {
  if (s.predicted.size() != s.observed.size()) {
    throw ValidationError("paired series have different lengths");
  }
  if (s.predicted.size() < min_len) {
    throw ValidationError("paired series need at least " + std::to_string(min_len) + " values");
  }
}

double mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double mean_squared_error(const PairedSeries& s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.predicted.size(); ++i) {
    const double d = s.predicted[i] - s.observed[i];
    sum += d * d;
  }
  return sum / static_cast<double>(s.predicted.size());
}

}  // namespace

double pearson(const PairedSeries& s) {
  check_lengths(s, 2);
  const double ms = mean(s.predicted);
  const double mo = mean(s.observed);
  double cov = 0.0, vs = 0.0, vo = 0.0;
  for (std::size_t i = 0; i < s.predicted.size(); ++i) {
    const double a = s.predicted[i] - ms;
    const double b = s.observed[i] - mo;
    cov += a * b;
    vs += a * a;
    vo += b * b;
  }
  if (!(vs > 0.0) || !(vo > 0.0)) throw ValidationError("undefined correlation (zero variance)");
  const double r = cov / std::sqrt(vs * vo);
  return std::clamp(r, -1.0, 1.0);
}

double mape(const PairedSeries& s) {
  check_lengths(s, 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.predicted.size(); ++i) {
    const double o = s.observed[i];
    if (!(o > 0.0)) throw ValidationError("MAPE requires positive observations");
    sum += std::abs(s.predicted[i] - o) / o;
  }
  return sum / static_cast<double>(s.predicted.size());
}

double prmse(const PairedSeries& s) {
  check_lengths(s, 1);
  const double mo = mean(s.observed);
  if (!(mo > 0.0)) throw ValidationError("PRMSE requires a positive mean observation");
  return std::sqrt(mean_squared_error(s)) / mo;
}

double r_squared(const PairedSeries& s) {
  check_lengths(s, 1);
  const double mo = mean(s.observed);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < s.predicted.size(); ++i) {
    const double r = s.predicted[i] - s.observed[i];
    const double t = s.observed[i] - mo;
    ss_res += r * r;
    ss_tot += t * t;
  }
  if (!(ss_tot > 0.0)) throw ValidationError("undefined R^2 (zero variance in observations)");
  return 1.0 - ss_res / ss_tot;
}

double rmsep(const PairedSeries& s) {
  check_lengths(s, 1);
  return std::sqrt(mean_squared_error(s));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("normal_quantile: p must be in (0,1)");
  // Acklam's coefficients.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

std::vector<ReliabilityPoint> reliability_curve(std::span<const GaussianForecast> forecasts,
                                                std::span<const double> observed,
                                                std::span<const double> levels) {
  if (forecasts.size() != observed.size()) {
    throw ValidationError("reliability_curve: forecasts and observations differ in length");
  }
  if (forecasts.empty()) throw ValidationError("reliability_curve: no forecasts");
  for (const GaussianForecast& f : forecasts) {
    if (!(f.sigma > 0.0)) throw ValidationError("reliability_curve: sigma must be > 0");
  }
  std::vector<ReliabilityPoint> curve;
  double previous = -1.0;
  for (double p : levels) {
    if (!(p > 0.0 && p < 1.0)) throw ValidationError("reliability_curve: levels must lie in (0,1)");
    if (!(p > previous)) throw ValidationError("reliability_curve: levels must be increasing");
    previous = p;
    const double z = normal_quantile(p);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
      if (observed[i] <= forecasts[i].mu + forecasts[i].sigma * z) ++covered;
    }
    curve.push_back({p, static_cast<double>(covered) / static_cast<double>(forecasts.size())});
  }
  return curve;
}

std::vector<double> decile_levels() {
  std::vector<double> levels;
  for (int i = 1; i <= 9; ++i) levels.push_back(i / 10.0);
  return levels;
}

}  // namespace cropforge
