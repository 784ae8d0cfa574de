#pragma once

// From-scratch MLP surrogate: ReLU hidden layers, a point head or a Gaussian
// (mu, sigma) head, trained with mini-batch gradient descent.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cropforge/rng.hpp"
#include "cropforge/types.hpp"

namespace cropforge::nn {

// ---- losses ---------------------------------------------------------------

/// Gaussian negative log-likelihood of xs under N(mu, sigma^2), summed.
double nll(std::span<const double> xs, double mu, double sigma);
/// Differential entropy of N(mu, sigma^2): 0.5 * ln(2 e pi sigma^2).
double entropy(double mu, double sigma);
/// nll - eta * entropy
double combined_loss(std::span<const double> xs, double mu, double sigma, double eta);

double softplus(double x) noexcept;
inline constexpr double kSigmaFloor = 1e-6;

// ---- model ----------------------------------------------------------------

enum class Head { Point, Distributional };
std::string_view head_name(Head h) noexcept;
std::optional<Head> parse_head(std::string_view s) noexcept;

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t weight_offset = 0;  // out x in, row-major
  std::size_t bias_offset = 0;
};

struct Output {
  double mu = 0.0;
  double sigma = 0.0;  // 0 for the point head
};

class Mlp {
 public:
  Mlp() = default;
  /// Glorot-uniform weights, zero biases.
  Mlp(std::size_t input_dim, std::vector<std::size_t> hidden, Head head, std::uint64_t seed);

  std::size_t input_dim() const noexcept { return input_dim_; }
  const std::vector<std::size_t>& hidden() const noexcept { return hidden_; }
  Head head() const noexcept { return head_; }
  std::size_t output_dim() const noexcept { return head_ == Head::Point ? 1 : 2; }
  const std::vector<LayerShape>& layers() const noexcept { return layers_; }

  std::vector<double>& params() noexcept { return params_; }
  const std::vector<double>& params() const noexcept { return params_; }

  /// Eval-mode forward pass on one normalized input.
  Output forward(std::span<const double> x) const;

 private:
  std::size_t input_dim_ = 0;
  std::vector<std::size_t> hidden_;
  Head head_ = Head::Point;
  std::vector<LayerShape> layers_;
  std::vector<double> params_;
};

/// Train-mode perturbations: input noise and inverted dropout on hidden units.
struct Perturbation {
  double noise_std = 0.0;
  double dropout = 0.0;
  Rng* rng = nullptr;
};

struct LossSettings {
  double eta = 0.0;           // entropy weight, distributional head only
  double weight_decay = 0.0;  // lambda; penalty lambda/2 * sum W^2 on weights
};

/// Mean per-sample loss over the batch (squared error or nll - eta*H).
/// Row-major x (n x input_dim), y (n).
double data_loss(const Mlp& model, std::span<const double> x, std::span<const double> y,
                 const LossSettings& settings);
/// data_loss + lambda/2 * sum W^2
double objective(const Mlp& model, std::span<const double> x, std::span<const double> y,
                 const LossSettings& settings);

/// Gradient of the objective with respect to every parameter, written into
/// `grad` (same layout as params). Returns the mean data loss of the batch
/// under `perturbation`. Throws NumericError naming the layer when an
/// activation is not finite.
double backward(const Mlp& model, std::span<const double> x, std::span<const double> y,
                const LossSettings& settings, std::span<double> grad, const Perturbation& perturbation = {});

// ---- normalization --------------------------------------------------------

struct Normalizer {
  std::vector<double> feature_min;
  std::vector<double> feature_max;
  double target_min = 0.0;
  double target_max = 1.0;

  /// Min/max over the given rows. Throws ValidationError naming a constant column.
  static Normalizer fit(const SurrogateDataset& data, std::span<const std::size_t> rows);

  std::size_t dimension() const noexcept { return feature_min.size(); }
  void transform(std::span<const double> raw, std::span<double> out) const;
  void inverse(std::span<const double> normalized, std::span<double> out) const;
  double transform_target(double y) const noexcept { return (y - target_min) / (target_max - target_min); }
  double inverse_target(double z) const noexcept { return target_min + z * (target_max - target_min); }
  double target_scale() const noexcept { return target_max - target_min; }
};

// ---- training -------------------------------------------------------------

struct TrainConfig {
  Head head = Head::Point;
  std::vector<std::size_t> hidden = {1000};
  double learning_rate = 5e-4;
  std::size_t max_epochs = 1000;
  std::size_t patience = 50;
  std::size_t batch_size = 32;
  double noise_std = 0.0824;
  double eta = 0.2359;
  double weight_decay = 1e-4;
  double dropout = 0.1;
  double split = 0.75;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

struct History {
  std::vector<EpochRecord> epochs;  // epoch 0 is the untrained baseline
  std::size_t best_epoch = 0;
  double best_val_loss = 0.0;
  bool diverged = false;
};

/// Trains `model` in place on normalized data, early-stopping on the
/// validation loss and restoring the best weights.
History fit(Mlp& model, std::span<const double> x_train, std::span<const double> y_train,
            std::span<const double> x_val, std::span<const double> y_val, const TrainConfig& config);

struct Surrogate {
  Mlp model;
  Normalizer normalizer;
  TrainConfig config;
};

struct TrainResult {
  Surrogate surrogate;
  History history;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
};

/// Seeded 75/25 shuffle split, normalization on the training rows, fit.
TrainResult train(const SurrogateDataset& data, const TrainConfig& config);

/// Row indices (train, test) of the seeded split used by train().
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(std::size_t n, double split,
                                                                          std::uint64_t seed);

/// Eval-mode predictions in physical units; sigma scaled by the target range.
std::vector<Output> predict_batch(const Surrogate& s, std::span<const double> features, std::size_t workers = 1);

// ---- persistence ----------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;
std::string write_model(const Surrogate& s);
Surrogate read_model(std::string_view json_text);
std::string write_history_csv(const History& h);

}  // namespace cropforge::nn
