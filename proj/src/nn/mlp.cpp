#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cropforge/error.hpp"
#include "cropforge/kernels.hpp"
#include "cropforge/nn.hpp"

namespace cropforge::nn {

std::string_view head_name(Head h) noexcept { return h == Head::Point ? "point" : "dist"; }

std::optional<Head> parse_head(std::string_view s) noexcept {
  if (s == "point") return Head::Point;
  if (s == "dist" || s == "distributional") return Head::Distributional;
  return std::nullopt;
}

Mlp::Mlp(std::size_t input_dim, std::vector<std::size_t> hidden, Head head, std::uint64_t seed)
    : input_dim_(input_dim), hidden_(std::move(hidden)), head_(head) {
  if (input_dim_ == 0) throw ValidationError("mlp: input dimension must be >= 1");
  std::size_t in = input_dim_;
  std::size_t offset = 0;
  std::vector<std::size_t> sizes = hidden_;
  sizes.push_back(output_dim());
  for (std::size_t out : sizes) {
    if (out == 0) throw ValidationError("mlp: layer sizes must be >= 1");
    LayerShape shape{in, out, offset, offset + in * out};
    offset = shape.bias_offset + out;
    layers_.push_back(shape);
    in = out;
  }
  params_.assign(offset, 0.0);
  Rng rng(seed);
  for (const LayerShape& l : layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
    for (std::size_t i = 0; i < l.in * l.out; ++i) params_[l.weight_offset + i] = rng.uniform(-limit, limit);
  }
}

namespace {

std::string layer_name(const Mlp& m, std::size_t l) {
  return l < m.hidden().size() ? "hidden" + std::to_string(l + 1) : std::string("output");
}

void check_finite(const Mlp& m, std::size_t l, std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericError("non-finite activation in layer " + layer_name(m, l));
  }
}

double sigmoid(double x) noexcept {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double sample_loss(Head head, std::span<const double> out, double target, double eta) {
  if (head == Head::Point) {
    const double d = out[0] - target;
    return d * d;
  }
  const double mu = out[0];
  const double sigma = softplus(out[1]) + kSigmaFloor;
  const double d = target - mu;
  const double log_var = std::log(sigma * sigma);
  return 0.5 * (std::log(2.0 * std::numbers::pi) + log_var) + d * d / (2.0 * sigma * sigma) -
         eta * 0.5 * (std::log(2.0 * std::numbers::e * std::numbers::pi) + log_var);
}

double decay_penalty(const Mlp& m, double lambda) {
  if (lambda == 0.0) return 0.0;
  const auto& k = kernels::active();
  double sum = 0.0;
  for (const LayerShape& l : m.layers()) {
    const double* w = m.params().data() + l.weight_offset;
    sum += k.dot(w, w, l.in * l.out);
  }
  return 0.5 * lambda * sum;
}

void check_batch(const Mlp& m, std::span<const double> x, std::span<const double> y) {
  if (y.empty()) throw ValidationError("mlp: empty batch");
  if (x.size() != y.size() * m.input_dim()) throw ValidationError("mlp: batch dimension mismatch");
}

/// Output layer values before the head transform.
std::vector<double> forward_raw(const Mlp& m, std::span<const double> x) {
  if (x.size() != m.input_dim()) {
    throw ValidationError("mlp: expected " + std::to_string(m.input_dim()) + " inputs, got " +
                          std::to_string(x.size()));
  }
  const auto& k = kernels::active();
  const auto& layers = m.layers();
  const double* params = m.params().data();
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> z;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const LayerShape& s = layers[l];
    z.resize(s.out);
    k.gemv(params + s.weight_offset, a.data(), params + s.bias_offset, z.data(), s.out, s.in);
    if (l + 1 < layers.size()) k.relu(z.data(), z.size());
    a.swap(z);
  }
  return a;
}

}  // namespace

Output Mlp::forward(std::span<const double> x) const {
  const std::vector<double> raw = forward_raw(*this, x);
  if (head_ == Head::Point) return {raw[0], 0.0};
  return {raw[0], softplus(raw[1]) + kSigmaFloor};
}

double data_loss(const Mlp& model, std::span<const double> x, std::span<const double> y,
                 const LossSettings& settings) {
  check_batch(model, x, y);
  const std::size_t d = model.input_dim();
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sum += sample_loss(model.head(), forward_raw(model, x.subspan(i * d, d)), y[i], settings.eta);
  }
  return sum / static_cast<double>(y.size());
}

double objective(const Mlp& model, std::span<const double> x, std::span<const double> y,
                 const LossSettings& settings) {
  return data_loss(model, x, y, settings) + decay_penalty(model, settings.weight_decay);
}

double backward(const Mlp& model, std::span<const double> x, std::span<const double> y,
                const LossSettings& settings, std::span<double> grad, const Perturbation& perturbation) {
  check_batch(model, x, y);
  if (grad.size() != model.params().size()) throw ValidationError("mlp: gradient buffer size mismatch");
  if ((perturbation.noise_std > 0.0 || perturbation.dropout > 0.0) && perturbation.rng == nullptr) {
    throw ValidationError("mlp: perturbation needs an rng");
  }
  if (!(perturbation.dropout >= 0.0 && perturbation.dropout < 1.0)) {
    throw ValidationError("mlp: dropout must be in [0,1)");
  }
  const auto& k = kernels::active();
  const auto& layers = model.layers();
  const std::size_t n_layers = layers.size();
  const double* params = model.params().data();
  const std::size_t d = model.input_dim();
  const double inv_n = 1.0 / static_cast<double>(y.size());
  const double keep_scale = 1.0 / (1.0 - perturbation.dropout);

  std::fill(grad.begin(), grad.end(), 0.0);
  // acts[l] is the input of layer l; pre[l] its pre-activation output.
  std::vector<std::vector<double>> acts(n_layers), pre(n_layers), scale(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    acts[l].resize(layers[l].in);
    pre[l].resize(layers[l].out);
    scale[l].assign(layers[l].out, 1.0);
  }
  std::vector<double> delta, delta_prev;

  double loss_sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(i * d), d, acts[0].begin());
    if (perturbation.noise_std > 0.0) {
      for (double& v : acts[0]) v += perturbation.rng->normal(0.0, perturbation.noise_std);
    }
    for (std::size_t l = 0; l < n_layers; ++l) {
      const LayerShape& s = layers[l];
      k.gemv(params + s.weight_offset, acts[l].data(), params + s.bias_offset, pre[l].data(), s.out, s.in);
      check_finite(model, l, pre[l]);
      if (l + 1 == n_layers) break;
      std::vector<double>& next = acts[l + 1];
      std::copy(pre[l].begin(), pre[l].end(), next.begin());
      k.relu(next.data(), next.size());
      if (perturbation.dropout > 0.0) {
        for (std::size_t u = 0; u < next.size(); ++u) {
          scale[l][u] = perturbation.rng->uniform() < perturbation.dropout ? 0.0 : keep_scale;
          next[u] *= scale[l][u];
        }
      }
    }

    const std::vector<double>& out = pre[n_layers - 1];
    loss_sum += sample_loss(model.head(), out, y[i], settings.eta);
    delta.assign(out.size(), 0.0);
    if (model.head() == Head::Point) {
      delta[0] = 2.0 * (out[0] - y[i]) * inv_n;
    } else {
      const double sigma = softplus(out[1]) + kSigmaFloor;
      const double diff = y[i] - out[0];
      const double s2 = sigma * sigma;
      delta[0] = -diff / s2 * inv_n;
      const double d_sigma = 1.0 / sigma - diff * diff / (s2 * sigma) - settings.eta / sigma;
      delta[1] = d_sigma * sigmoid(out[1]) * inv_n;
    }

    for (std::size_t l = n_layers; l-- > 0;) {
      const LayerShape& s = layers[l];
      k.rank1(grad.data() + s.weight_offset, delta.data(), acts[l].data(), s.out, s.in);
      k.axpy(1.0, delta.data(), grad.data() + s.bias_offset, s.out);
      if (l == 0) break;
      delta_prev.resize(s.in);
      k.gemv_t(params + s.weight_offset, delta.data(), delta_prev.data(), s.out, s.in);
      for (std::size_t u = 0; u < s.in; ++u) {
        delta_prev[u] = pre[l - 1][u] > 0.0 ? delta_prev[u] * scale[l - 1][u] : 0.0;
      }
      delta.swap(delta_prev);
    }
  }

  if (settings.weight_decay != 0.0) {
    for (const LayerShape& s : layers) {
      k.axpy(settings.weight_decay, params + s.weight_offset, grad.data() + s.weight_offset, s.in * s.out);
    }
  }
  return loss_sum * inv_n;
}

}  // namespace cropforge::nn
