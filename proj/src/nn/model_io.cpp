#include <cmath>

#include <json.hpp>

#include "cropforge/error.hpp"
#include "cropforge/io.hpp"
#include "cropforge/nn.hpp"

namespace cropforge::nn {

using nlohmann::json;
using nlohmann::ordered_json;

std::string write_model(const Surrogate& s) {
  const Mlp& m = s.model;
  ordered_json doc;
  doc["format"] = "cropforge-mlp";
  doc["version"] = kModelFormatVersion;
  doc["head"] = head_name(m.head());
  doc["input_dim"] = m.input_dim();
  doc["hidden"] = m.hidden();
  ordered_json layers = ordered_json::array();
  for (const LayerShape& l : m.layers()) {
    const auto* p = m.params().data();
    layers.push_back({{"in", l.in},
                      {"out", l.out},
                      {"weights", std::vector<double>(p + l.weight_offset, p + l.weight_offset + l.in * l.out)},
                      {"bias", std::vector<double>(p + l.bias_offset, p + l.bias_offset + l.out)}});
  }
  doc["layers"] = layers;
  doc["normalizer"] = {{"feature_min", s.normalizer.feature_min},
                       {"feature_max", s.normalizer.feature_max},
                       {"target_min", s.normalizer.target_min},
                       {"target_max", s.normalizer.target_max}};
  const TrainConfig& c = s.config;
  doc["config"] = {{"learning_rate", c.learning_rate}, {"max_epochs", c.max_epochs},
                   {"patience", c.patience},           {"batch_size", c.batch_size},
                   {"noise_std", c.noise_std},         {"eta", c.eta},
                   {"weight_decay", c.weight_decay},   {"dropout", c.dropout},
                   {"split", c.split},                 {"seed", c.seed}};
  return doc.dump(1) + "\n";
}

Surrogate read_model(std::string_view text) {
  Surrogate s;
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != "cropforge-mlp") throw ParseError("model: unknown format");
    if (doc.at("version").get<int>() != kModelFormatVersion) throw ParseError("model: unsupported version");
    const auto head = parse_head(doc.at("head").get<std::string>());
    if (!head) throw ParseError("model: unknown head");
    s.model = Mlp(doc.at("input_dim").get<std::size_t>(), doc.at("hidden").get<std::vector<std::size_t>>(), *head, 0);
    const json& layers = doc.at("layers");
    if (layers.size() != s.model.layers().size()) throw ParseError("model: layer count mismatch");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      const LayerShape& l = s.model.layers()[i];
      const auto w = layers[i].at("weights").get<std::vector<double>>();
      const auto b = layers[i].at("bias").get<std::vector<double>>();
      if (layers[i].at("in").get<std::size_t>() != l.in || layers[i].at("out").get<std::size_t>() != l.out ||
          w.size() != l.in * l.out || b.size() != l.out) {
        throw ParseError("model: layer " + std::to_string(i) + " shape mismatch");
      }
      std::copy(w.begin(), w.end(), s.model.params().begin() + static_cast<std::ptrdiff_t>(l.weight_offset));
      std::copy(b.begin(), b.end(), s.model.params().begin() + static_cast<std::ptrdiff_t>(l.bias_offset));
    }
    const json& n = doc.at("normalizer");
    s.normalizer.feature_min = n.at("feature_min").get<std::vector<double>>();
    s.normalizer.feature_max = n.at("feature_max").get<std::vector<double>>();
    s.normalizer.target_min = n.at("target_min").get<double>();
    s.normalizer.target_max = n.at("target_max").get<double>();
    if (s.normalizer.dimension() != s.model.input_dim() || s.normalizer.feature_max.size() != s.model.input_dim()) {
      throw ParseError("model: normalizer dimension mismatch");
    }
    const json& c = doc.at("config");
    TrainConfig& cfg = s.config;
    cfg.head = *head;
    cfg.hidden = s.model.hidden();
    cfg.learning_rate = c.at("learning_rate").get<double>();
    cfg.max_epochs = c.at("max_epochs").get<std::size_t>();
    cfg.patience = c.at("patience").get<std::size_t>();
    cfg.batch_size = c.at("batch_size").get<std::size_t>();
    cfg.noise_std = c.at("noise_std").get<double>();
    cfg.eta = c.at("eta").get<double>();
    cfg.weight_decay = c.at("weight_decay").get<double>();
    cfg.dropout = c.at("dropout").get<double>();
    cfg.split = c.at("split").get<double>();
    cfg.seed = c.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  for (double v : s.model.params()) {
    if (!std::isfinite(v)) throw ParseError("model: non-finite weight");
  }
  return s;
}

std::string write_history_csv(const History& h) {
  std::string out = "epoch,train_loss,val_loss\n";
  for (const EpochRecord& e : h.epochs) {
    out += std::to_string(e.epoch) + "," + format_number(e.train_loss) + "," + format_number(e.val_loss) + "\n";
  }
  return out;
}

}  // namespace cropforge::nn
