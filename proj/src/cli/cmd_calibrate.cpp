#include <charconv>
#include <sstream>

#include "cli/common.hpp"
#include "cropforge/io.hpp"

namespace cropforge::cli {

namespace {

struct CalibrateArgs {
  std::string config, yields, weather_dir, soil, out, bounds, lai_dir;
  double alpha = 1.0;
  double beta = 0.0;
  std::size_t swarm = 30;
  std::size_t iters = 150;
  std::size_t jobs = 0;
  std::uint64_t seed = 0;
  bool strict = false;
  SeasonCalendar calendar;
};

// One LAI value per line after a `lai` header.
std::vector<double> read_lai_file(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  std::vector<double> out;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line == "lai") continue;
    if (line.empty()) continue;
    double v = 0.0;
    const auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc{} || p != line.data() + line.size() || !(v >= 0.0)) {
      throw ParseError(path.string() + ": bad LAI value", lineno, line);
    }
    out.push_back(v);
  }
  if (out.empty()) throw ParseError(path.string() + ": no LAI values");
  return out;
}

void run_calibrate(Session& s, CLI::App& app, CalibrateArgs& a) {
  apply_config(app, a.config);
  require(app, {"--yields", "--weather-dir", "--soil", "--out"});
  if (a.beta > 0.0 && a.lai_dir.empty()) {
    throw UsageError("--beta > 0 weighs the LAI error, which needs reference LAI series: pass --lai-dir");
  }
  CalibrationSetup setup;
  setup.weights = {a.alpha, a.beta};
  setup.weights.validate();
  setup.pso.swarm_size = a.swarm;
  setup.pso.iterations = a.iters;
  setup.pso.seed = resolve_seed(app, a.seed);
  setup.pso.validate();
  setup.calendar = a.calendar;
  setup.bounds = load_bounds(a.bounds);
  const std::size_t jobs = resolve_jobs(a.jobs);

  const auto records = parse_yield_records(read_input(a.yields, "yields"));
  const SoilProfile soil = load_soil(a.soil);
  WeatherDirectory weather(a.weather_dir);
  if (!a.lai_dir.empty() && !fs::is_directory(a.lai_dir)) throw UsageError("LAI directory not found: " + a.lai_dir);

  std::vector<FieldObservation> observations;
  std::vector<std::string> failures;
  for (const YieldRecord& rec : records) {
    const std::string where = rec.county + " " + std::to_string(rec.year) + " " + number(rec.lat) + "," +
                              number(rec.lon);
    try {
      FieldObservation obs;
      obs.record = rec;
      obs.soil = soil;
      obs.weather = season_slice(weather.lookup(rec.county, rec.lat, rec.lon), rec.year);
      if (!a.lai_dir.empty()) {
        const fs::path lai = fs::path(a.lai_dir) /
                             (field_weather_stem(rec.county, rec.lat, rec.lon) + "_" + std::to_string(rec.year) + ".csv");
        if (!fs::is_regular_file(lai)) throw ValidationError("no LAI reference " + lai.string());
        obs.lai_reference = read_lai_file(lai);
      }
      observations.push_back(std::move(obs));
    } catch (const Error& e) {
      failures.push_back(where + ": " + e.what());
    }
  }

  const std::size_t total = records.size();
  std::size_t done = 0;
  auto progress = [&](std::size_t, const FieldObservation& obs, const std::optional<CalibrationEntry>& entry) {
    ++done;
    s.err << "[" << done << "/" << observations.size() << "] " << obs.record.county << " " << obs.record.year << " "
          << number(obs.record.lat) << "," << number(obs.record.lon);
    if (entry) {
      s.err << " cost " << fixed(entry->calibration_cost, 4) << "\n";
    } else {
      s.err << " failed\n";
    }
  };
  BatchResult batch;
  if (!observations.empty()) {
    batch = calibrate_batch(observations, setup, jobs, progress);
  }
  for (const FieldFailure& f : batch.failures) {
    const YieldRecord& rec = observations[f.index].record;
    failures.push_back(rec.county + " " + std::to_string(rec.year) + " " + number(rec.lat) + "," + number(rec.lon) +
                       ": " + f.message);
  }
  if (total > 0 && failures.size() == total) {
    throw Error("all " + std::to_string(total) + " fields failed to calibrate; first: " + failures.front());
  }

  write_text_file_atomic(a.out, write_calibration_db(batch.db));
  Manifest m("calibrate", app, a.config, s);
  m.set("seed", setup.pso.seed);
  m.set("jobs", jobs);
  m.input("yields", a.yields);
  m.input("weather_dir", a.weather_dir);
  m.input("soil", a.soil);
  if (!a.bounds.empty()) m.input("bounds", a.bounds);
  if (!a.lai_dir.empty()) m.input("lai_dir", a.lai_dir);
  m.output("calibration", a.out);
  m.set("fields", total);
  m.set("failures", failures);
  m.write(a.out);

  if (!failures.empty()) {
    s.err << "warning: " << failures.size() << " of " << total << " fields failed to calibrate\n";
    for (const std::string& f : failures) s.err << "  " << f << "\n";
    if (a.strict) throw Error("--strict: " + std::to_string(failures.size()) + " fields failed");
  }
  s.out << "calibrated " << total - failures.size() << " of " << total << " fields -> " << a.out << "\n";
}

}  // namespace

void register_calibrate(CLI::App& root, Registry& registry) {
  auto args = std::make_shared<CalibrateArgs>();
  CLI::App* app = root.add_subcommand("calibrate", "fit genetic coefficients to measured field yields");
  CalibrateArgs& a = *args;
  add_config_option(*app, a.config);
  app->add_option("--yields", a.yields, "yield table CSV");
  app->add_option("--weather-dir", a.weather_dir, "directory of .wth files");
  app->add_option("--soil", a.soil, "soil profile JSON");
  app->add_option("--out", a.out, "calibration database JSON to write");
  app->add_option("--alpha", a.alpha, "yield term weight")->capture_default_str();
  app->add_option("--beta", a.beta, "LAI term weight")->capture_default_str();
  app->add_option("--swarm", a.swarm, "particles")->capture_default_str();
  app->add_option("--iters", a.iters, "PSO iterations")->capture_default_str();
  app->add_option("--jobs", a.jobs, "worker threads (0: all cores)");
  app->add_option("--seed", a.seed, "base seed");
  app->add_flag("--strict", a.strict, "exit 1 if any field fails");
  app->add_option("--bounds", a.bounds, "genetic coefficient bounds JSON");
  app->add_option("--lai-dir", a.lai_dir, "reference LAI series, <field>_<year>.csv");
  add_calendar_options(*app, a.calendar);
  registry.push_back({app, [app, args](Session& s) { run_calibrate(s, *app, *args); }});
}

}  // namespace cropforge::cli
