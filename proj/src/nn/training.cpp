#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cropforge/error.hpp"
#include "cropforge/kernels.hpp"
#include "cropforge/nn.hpp"
#include "cropforge/parallel.hpp"

namespace cropforge::nn {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("learning rate must be > 0");
  if (patience < 1) throw ValidationError("patience must be >= 1");
  if (batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (max_epochs < 1) throw ValidationError("max epochs must be >= 1");
  if (!(split > 0.0 && split < 1.0)) throw ValidationError("split must be in (0,1)");
  if (!(noise_std >= 0.0)) throw ValidationError("noise std must be >= 0");
  if (!(eta >= 0.0)) throw ValidationError("eta must be >= 0");
  if (!(weight_decay >= 0.0)) throw ValidationError("weight decay must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ValidationError("dropout must be in [0,1)");
}

History fit(Mlp& model, std::span<const double> x_train, std::span<const double> y_train,
            std::span<const double> x_val, std::span<const double> y_val, const TrainConfig& config) {
  config.validate();
  if (model.head() != config.head) throw ValidationError("fit: model head differs from config");
  const std::size_t d = model.input_dim();
  const LossSettings settings{config.head == Head::Distributional ? config.eta : 0.0, config.weight_decay};
  const auto& k = kernels::active();

  History history;
  const double val0 = data_loss(model, x_val, y_val, settings);
  history.epochs.push_back({0, data_loss(model, x_train, y_train, settings), val0});
  history.best_epoch = 0;
  history.best_val_loss = val0;
  std::vector<double> best = model.params();

  Rng rng(hash64({config.seed, 0x545241494eULL}));
  std::vector<std::size_t> order(y_train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(model.params().size());
  std::vector<double> bx, by;
  const Perturbation perturbation{config.noise_std, config.dropout, &rng};

  std::size_t wait = 0;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    bool diverged = false;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      bx.clear();
      by.clear();
      for (std::size_t i = start; i < end; ++i) {
        bx.insert(bx.end(), x_train.begin() + static_cast<std::ptrdiff_t>(order[i] * d),
                  x_train.begin() + static_cast<std::ptrdiff_t>((order[i] + 1) * d));
        by.push_back(y_train[order[i]]);
      }
      double batch_loss;
      try {
        batch_loss = backward(model, bx, by, settings, grad, perturbation);
      } catch (const NumericError&) {
        diverged = true;
        break;
      }
      if (!std::isfinite(batch_loss)) {
        diverged = true;
        break;
      }
      loss_sum += batch_loss * static_cast<double>(end - start);
      k.sgd_step(model.params().data(), grad.data(), config.learning_rate, grad.size());
    }
    const double val = diverged ? NAN : data_loss(model, x_val, y_val, settings);
    if (diverged || !std::isfinite(val)) {
      history.diverged = true;
      break;
    }
    history.epochs.push_back({epoch, loss_sum / static_cast<double>(order.size()), val});
    if (val < history.best_val_loss) {
      history.best_val_loss = val;
      history.best_epoch = epoch;
      best = model.params();
      wait = 0;
    } else if (++wait >= config.patience) {
      break;
    }
  }
  model.params() = std::move(best);
  return history;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(std::size_t n, double split,
                                                                          std::uint64_t seed) {
  if (n < 2) throw ValidationError("split: need at least 2 rows");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(hash64({seed, 0x53504c4954ULL}));
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_train = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(split * static_cast<double>(n))),
                                               1, n - 1);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

namespace {

void gather(const SurrogateDataset& data, const Normalizer& norm, std::span<const std::size_t> rows,
            std::vector<double>& x, std::vector<double>& y) {
  const std::size_t d = data.n_features;
  x.resize(rows.size() * d);
  y.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    norm.transform({data.row(rows[i]), d}, std::span<double>(x).subspan(i * d, d));
    y[i] = norm.transform_target(data.yields[rows[i]]);
  }
}

}  // namespace

TrainResult train(const SurrogateDataset& data, const TrainConfig& config) {
  config.validate();
  if (data.rows() < 8) throw ValidationError("train: need at least 8 rows, got " + std::to_string(data.rows()));
  for (double v : data.features) {
    if (!std::isfinite(v)) throw ValidationError("train: dataset has non-finite features");
  }
  TrainResult result;
  std::tie(result.train_rows, result.test_rows) = split_rows(data.rows(), config.split, config.seed);
  Surrogate& s = result.surrogate;
  s.config = config;
  s.normalizer = Normalizer::fit(data, result.train_rows);
  s.model = Mlp(data.n_features, config.hidden, config.head, hash64({config.seed, 0x494e4954ULL}));

  std::vector<double> xtr, ytr, xva, yva;
  gather(data, s.normalizer, result.train_rows, xtr, ytr);
  gather(data, s.normalizer, result.test_rows, xva, yva);
  result.history = fit(s.model, xtr, ytr, xva, yva, config);
  return result;
}

std::vector<Output> predict_batch(const Surrogate& s, std::span<const double> features, std::size_t workers) {
  const std::size_t d = s.model.input_dim();
  if (d == 0 || features.size() % d != 0) throw ValidationError("predict: feature matrix does not match model inputs");
  if (s.normalizer.dimension() != d) throw ValidationError("predict: normalizer does not match model inputs");
  const std::size_t n = features.size() / d;
  std::vector<Output> out(n);
  // Shard into contiguous blocks so thread start-up stays negligible.
  const std::size_t blocks = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(n, 1));
  const auto errors = parallel_for(blocks, blocks, [&](std::size_t b) {
    std::vector<double> z(d);
    for (std::size_t i = b * n / blocks; i < (b + 1) * n / blocks; ++i) {
      s.normalizer.transform(features.subspan(i * d, d), z);
      const Output o = s.model.forward(z);
      out[i] = {s.normalizer.inverse_target(o.mu), o.sigma * s.normalizer.target_scale()};
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace cropforge::nn
