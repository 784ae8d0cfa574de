#include "cli/common.hpp"
#include "cropforge/io.hpp"
#include "cropforge/sampling.hpp"

namespace cropforge::cli {

namespace {

struct SampleArgs {
  std::string config, space, soil, out, bounds;
  std::size_t n = 700;
  SeasonWindow season{2018, 120, 180};
  std::uint64_t seed = 0;
  std::size_t jobs = 0;
};

void run_sample(Session& s, CLI::App& app, SampleArgs& a) {
  apply_config(app, a.config);
  require(app, {"--soil", "--out"});
  if (a.n == 0) throw UsageError("--n must be >= 1");
  a.season.validate();
  const std::uint64_t seed = resolve_seed(app, a.seed);
  const std::size_t jobs = resolve_jobs(a.jobs);
  auto bounds = load_bounds(a.bounds);
  ParameterSpace space = default_parameter_space();
  if (!a.space.empty()) {
    space = parse_parameter_space(read_input(a.space, "space"), std::move(bounds));
  } else {
    space.genetic_bounds = std::move(bounds);
  }
  space.validate();
  const SoilProfile soil = load_soil(a.soil);

  Manifest m("sample", app, a.config, s);
  m.set("seed", seed);
  m.set("jobs", jobs);
  if (!a.space.empty()) m.input("space", a.space);
  m.input("soil", a.soil);
  m.output("dataset", a.out);

  const DatasetResult result = generate_dataset(space, a.n, a.season, soil, seed, jobs);
  json failures = json::array();
  for (const SampleFailure& f : result.failures) failures.push_back({{"row", f.row}, {"error", f.message}});
  write_text_file_atomic(a.out, write_dataset(result.dataset));
  m.set("rows", result.dataset.rows());
  m.set("failures", failures);
  m.write(a.out);
  if (!result.failures.empty()) {
    s.err << "warning: " << result.failures.size() << " of " << a.n << " samples failed and were dropped\n";
  }
  s.out << "wrote " << result.dataset.rows() << " samples -> " << a.out << "\n";
}

}  // namespace

void register_sample(CLI::App& root, Registry& registry) {
  auto args = std::make_shared<SampleArgs>();
  SampleArgs& a = *args;
  CLI::App* app = root.add_subcommand("sample", "Sobol-sampled simulator runs for surrogate training");
  add_config_option(*app, a.config);
  app->add_option("--n", a.n, "samples")->capture_default_str();
  app->add_option("--space", a.space, "weather space JSON (default: built-in)");
  app->add_option("--bounds", a.bounds, "genetic coefficient bounds JSON");
  app->add_option("--soil", a.soil, "soil profile JSON");
  app->add_option("--season-start", a.season.start_doy, "first season day of year")->capture_default_str();
  app->add_option("--season-days", a.season.length_days, "season length")->capture_default_str();
  app->add_option("--season-year", a.season.year, "season year")->capture_default_str();
  app->add_option("--out", a.out, "dataset CSV to write");
  app->add_option("--seed", a.seed, "weather synthesis seed");
  app->add_option("--jobs", a.jobs, "worker threads (0: all cores)");
  registry.push_back({app, [app, args](Session& s) { run_sample(s, *app, *args); }});
}

}  // namespace cropforge::cli
