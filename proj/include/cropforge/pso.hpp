#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace cropforge {

/// Global-best particle swarm over the unit box [0,1]^D.
struct PsoConfig {
  std::size_t swarm_size = 30;
  /// Rounds of swarm evaluation, counting the initial one.
  std::size_t iterations = 150;
  double inertia = 0.72;
  double cognitive = 1.49;
  double social = 1.49;
  /// Per-dimension bound on |velocity|.
  double velocity_clamp = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PsoResult {
  std::vector<double> best_position;
  double best_cost = 0.0;
  /// Best cost after each round; non-increasing.
  std::vector<double> history;
  std::size_t evaluations = 0;
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes `objective` over [0,1]^dimension. Non-finite objective values
/// count as +inf; if no particle has a finite cost after the first round the
/// run fails with NumericError.
PsoResult pso_minimize(const Objective& objective, std::size_t dimension, const PsoConfig& config);

}  // namespace cropforge
