#include <cmath>
#include <numbers>

#include "cropforge/error.hpp"
#include "cropforge/nn.hpp"

namespace cropforge::nn {

namespace {

void check_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("sigma must be finite and > 0");
}

}  // namespace

double nll(std::span<const double> xs, double mu, double sigma) {
  check_sigma(sigma);
  if (xs.empty()) throw ValidationError("nll: no observations");
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  const double n = static_cast<double>(xs.size());
  return 0.5 * n * std::log(2.0 * std::numbers::pi * sigma * sigma) + ss / (2.0 * sigma * sigma);
}

double entropy(double /*mu*/, double sigma) {
  check_sigma(sigma);
  return 0.5 * std::log(2.0 * std::numbers::e * std::numbers::pi * sigma * sigma);
}

double combined_loss(std::span<const double> xs, double mu, double sigma, double eta) {
  return nll(xs, mu, sigma) - eta * entropy(mu, sigma);
}

double softplus(double x) noexcept {
  // log(1 + e^x) without overflow for large x.
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace cropforge::nn
