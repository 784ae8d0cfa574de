#include "cropforge/pso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cropforge/error.hpp"
#include "cropforge/rng.hpp"

namespace cropforge {

void PsoConfig::validate() const {
  if (swarm_size < 2) throw ValidationError("pso: swarm_size must be >= 2");
  if (iterations < 1) throw ValidationError("pso: iterations must be >= 1");
  if (!(inertia >= 0.0 && inertia < 1.0)) throw ValidationError("pso: inertia must be in [0,1)");
  if (!(cognitive > 0.0) || !(social > 0.0)) throw ValidationError("pso: c1 and c2 must be > 0");
  if (!(velocity_clamp > 0.0)) throw ValidationError("pso: velocity clamp must be > 0");
}

namespace {

struct Particle {
  std::vector<double> position;
  std::vector<double> velocity;
  std::vector<double> best_position;
  double best_cost = std::numeric_limits<double>::infinity();
};

double evaluate(const Objective& f, std::span<const double> x) {
  const double c = f(x);
  return std::isfinite(c) ? c : std::numeric_limits<double>::infinity();
}

}  // namespace

PsoResult pso_minimize(const Objective& objective, std::size_t dimension, const PsoConfig& config) {
  config.validate();
  if (dimension == 0) throw ValidationError("pso: dimension must be >= 1");

  Rng rng(config.seed);
  const double vmax = config.velocity_clamp;
  std::vector<Particle> swarm(config.swarm_size);
  for (Particle& p : swarm) {
    p.position.resize(dimension);
    p.velocity.resize(dimension);
    for (std::size_t d = 0; d < dimension; ++d) p.position[d] = rng.uniform();
    for (std::size_t d = 0; d < dimension; ++d) p.velocity[d] = rng.uniform(-vmax, vmax);
  }

  PsoResult result;
  result.best_cost = std::numeric_limits<double>::infinity();
  result.history.reserve(config.iterations);

  for (Particle& p : swarm) {
    p.best_cost = evaluate(objective, p.position);
    p.best_position = p.position;
    ++result.evaluations;
    if (p.best_cost < result.best_cost) {
      result.best_cost = p.best_cost;
      result.best_position = p.position;
    }
  }
  if (!std::isfinite(result.best_cost)) {
    throw NumericError("pso: objective is non-finite for the whole initial swarm");
  }
  result.history.push_back(result.best_cost);

  for (std::size_t iter = 1; iter < config.iterations; ++iter) {
    // Global best is fixed for the whole round (synchronous update).
    const std::vector<double> gbest = result.best_position;
    for (Particle& p : swarm) {
      for (std::size_t d = 0; d < dimension; ++d) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        double v = config.inertia * p.velocity[d] +
                   config.cognitive * r1 * (p.best_position[d] - p.position[d]) +
                   config.social * r2 * (gbest[d] - p.position[d]);
        v = std::clamp(v, -vmax, vmax);
        double x = p.position[d] + v;
        if (x < 0.0) {
          x = 0.0;
          v = 0.0;
        } else if (x > 1.0) {
          x = 1.0;
          v = 0.0;
        }
        p.velocity[d] = v;
        p.position[d] = x;
      }
      const double cost = evaluate(objective, p.position);
      ++result.evaluations;
      if (cost < p.best_cost) {
        p.best_cost = cost;
        p.best_position = p.position;
      }
    }
    for (const Particle& p : swarm) {
      if (p.best_cost < result.best_cost) {
        result.best_cost = p.best_cost;
        result.best_position = p.best_position;
      }
    }
    result.history.push_back(result.best_cost);
  }
  return result;
}

}  // namespace cropforge
