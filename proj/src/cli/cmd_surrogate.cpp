#include <sstream>

#include "cli/common.hpp"
#include "cropforge/io.hpp"
#include "cropforge/metrics.hpp"
#include "cropforge/nn.hpp"

namespace cropforge::cli {

namespace {

struct TrainArgs {
  std::string config, data, out, head = "point";
  nn::TrainConfig train;
  std::uint64_t seed = 0;
};

SurrogateDataset subset(const SurrogateDataset& data, const std::vector<std::size_t>& rows) {
  SurrogateDataset out;
  out.n_features = data.n_features;
  for (std::size_t r : rows) {
    out.features.insert(out.features.end(), data.row(r), data.row(r) + data.n_features);
    out.yields.push_back(data.yields[r]);
  }
  return out;
}

void run_train(Session& s, CLI::App& app, TrainArgs& a) {
  apply_config(app, a.config);
  require(app, {"--data", "--out"});
  const auto head = nn::parse_head(a.head);
  if (!head) throw UsageError("--head must be point or dist");
  a.train.head = *head;
  a.train.seed = resolve_seed(app, a.seed);
  a.train.validate();
  const SurrogateDataset data = read_dataset(read_input(a.data, "dataset"));
  if (data.rows() < 4) throw UsageError("dataset needs at least 4 rows to split");

  const nn::TrainResult r = nn::train(data, a.train);
  const SurrogateDataset test = subset(data, r.test_rows);
  const auto predicted = nn::predict_batch(r.surrogate, test.features);
  std::vector<double> mu;
  for (const nn::Output& o : predicted) mu.push_back(o.mu);
  std::optional<double> r2;
  try {
    r2 = r_squared({mu, test.yields});
  } catch (const ValidationError&) {
  }

  const std::string history_path = a.out + ".history.csv";
  const std::string test_path = a.out + ".test.csv";
  write_text_file_atomic(a.out, nn::write_model(r.surrogate));
  write_text_file_atomic(history_path, nn::write_history_csv(r.history));
  write_text_file_atomic(test_path, write_dataset(test));
  Manifest m("train", app, a.config, s);
  m.set("seed", a.train.seed);
  m.input("dataset", a.data);
  m.output("model", a.out);
  m.output("history", history_path);
  m.output("test_set", test_path);
  m.set("train_rows", r.train_rows.size());
  m.set("test_rows", r.test_rows.size());
  m.set("best_epoch", r.history.best_epoch);
  m.set("diverged", r.history.diverged);
  m.set("held_out_r2", r2 ? json(*r2) : json("undefined"));
  m.write(a.out);
  if (r.history.diverged) s.err << "warning: training diverged; kept the best weights before it\n";
  s.out << "held-out R2 " << (r2 ? fixed(*r2, 4) : std::string("undefined")) << " on "
        << r.test_rows.size() << " rows, best epoch " << r.history.best_epoch << " -> " << a.out << "\n";
}

struct PredictArgs {
  std::string config, model, data, out;
  std::size_t jobs = 0;
};

void run_predict(Session& s, CLI::App& app, PredictArgs& a) {
  apply_config(app, a.config);
  require(app, {"--model", "--data", "--out"});
  const nn::Surrogate model = nn::read_model(read_input(a.model, "model"));
  const SurrogateDataset data = read_dataset(read_input(a.data, "dataset"));
  if (data.n_features != model.model.input_dim()) {
    throw UsageError("dataset has " + std::to_string(data.n_features) + " features, model expects " +
                     std::to_string(model.model.input_dim()));
  }
  const std::size_t jobs = resolve_jobs(a.jobs);
  const auto predicted = nn::predict_batch(model, data.features, jobs);
  const bool dist = model.model.head() == nn::Head::Distributional;
  std::ostringstream csv;
  csv << (dist ? "predicted,sigma\n" : "predicted\n");
  for (const nn::Output& o : predicted) {
    csv << number(o.mu);
    if (dist) csv << "," << number(o.sigma);
    csv << "\n";
  }
  write_text_file_atomic(a.out, csv.str());
  Manifest m("predict", app, a.config, s);
  m.set("jobs", jobs);
  m.input("model", a.model);
  m.input("dataset", a.data);
  m.output("predictions", a.out);
  m.set("rows", predicted.size());
  m.write(a.out);
  s.out << "wrote " << predicted.size() << " predictions -> " << a.out << "\n";
}

}  // namespace

void register_train(CLI::App& root, Registry& registry) {
  auto args = std::make_shared<TrainArgs>();
  TrainArgs& a = *args;
  nn::TrainConfig& c = a.train;
  CLI::App* app = root.add_subcommand("train", "train a surrogate on a sampled dataset");
  add_config_option(*app, a.config);
  app->add_option("--data", a.data, "dataset CSV");
  app->add_option("--head", a.head, "point or dist")->capture_default_str();
  app->add_option("--out", a.out, "model JSON to write");
  app->add_option("--lr", c.learning_rate, "learning rate")->capture_default_str();
  app->add_option("--epochs", c.max_epochs, "maximum epochs")->capture_default_str();
  app->add_option("--patience", c.patience, "early-stopping patience")->capture_default_str();
  app->add_option("--batch", c.batch_size, "mini-batch size")->capture_default_str();
  app->add_option("--noise", c.noise_std, "input noise sd (normalized units)")->capture_default_str();
  app->add_option("--eta", c.eta, "entropy weight (dist head)")->capture_default_str();
  app->add_option("--weight-decay", c.weight_decay, "L2 penalty")->capture_default_str();
  app->add_option("--dropout", c.dropout, "hidden dropout rate")->capture_default_str();
  app->add_option("--split", c.split, "training fraction")->capture_default_str();
  app->add_option("--hidden", c.hidden, "hidden layer widths")->capture_default_str();
  app->add_option("--seed", a.seed, "init, split and batch order seed");
  registry.push_back({app, [app, args](Session& s) { run_train(s, *app, *args); }});
}

void register_predict(CLI::App& root, Registry& registry) {
  auto args = std::make_shared<PredictArgs>();
  PredictArgs& a = *args;
  CLI::App* app = root.add_subcommand("predict", "run a trained surrogate over a dataset");
  add_config_option(*app, a.config);
  app->add_option("--model", a.model, "model JSON");
  app->add_option("--data", a.data, "dataset CSV (the yield column is ignored)");
  app->add_option("--out", a.out, "predictions CSV");
  app->add_option("--jobs", a.jobs, "worker threads (0: all cores)");
  registry.push_back({app, [app, args](Session& s) { run_predict(s, *app, *args); }});
}

}  // namespace cropforge::cli
