#include <algorithm>
#include <cmath>
#include <limits>

#include "cropforge/error.hpp"
#include "cropforge/io.hpp"
#include "cropforge/nn.hpp"

namespace cropforge::nn {

Normalizer Normalizer::fit(const SurrogateDataset& data, std::span<const std::size_t> rows) {
  if (rows.empty()) throw ValidationError("normalizer: no rows");
  const std::size_t d = data.n_features;
  Normalizer n;
  n.feature_min.assign(d, std::numeric_limits<double>::infinity());
  n.feature_max.assign(d, -std::numeric_limits<double>::infinity());
  n.target_min = std::numeric_limits<double>::infinity();
  n.target_max = -std::numeric_limits<double>::infinity();
  for (std::size_t r : rows) {
    const double* x = data.row(r);
    for (std::size_t j = 0; j < d; ++j) {
      n.feature_min[j] = std::min(n.feature_min[j], x[j]);
      n.feature_max[j] = std::max(n.feature_max[j], x[j]);
    }
    n.target_min = std::min(n.target_min, data.yields[r]);
    n.target_max = std::max(n.target_max, data.yields[r]);
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (!(n.feature_max[j] > n.feature_min[j])) {
      throw ValidationError("normalizer: column " + feature_column_name(j) + " is constant on the training rows");
    }
  }
  if (!(n.target_max > n.target_min)) throw ValidationError("normalizer: column yield is constant on the training rows");
  return n;
}

void Normalizer::transform(std::span<const double> raw, std::span<double> out) const {
  if (raw.size() != dimension() || out.size() != dimension()) throw ValidationError("normalizer: dimension mismatch");
  for (std::size_t j = 0; j < raw.size(); ++j) {
    out[j] = (raw[j] - feature_min[j]) / (feature_max[j] - feature_min[j]);
  }
}

void Normalizer::inverse(std::span<const double> normalized, std::span<double> out) const {
  if (normalized.size() != dimension() || out.size() != dimension()) {
    throw ValidationError("normalizer: dimension mismatch");
  }
  for (std::size_t j = 0; j < normalized.size(); ++j) {
    out[j] = feature_min[j] + normalized[j] * (feature_max[j] - feature_min[j]);
  }
}

}  // namespace cropforge::nn
