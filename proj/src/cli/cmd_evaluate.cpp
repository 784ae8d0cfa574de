#include <set>
#include <sstream>

#include "cli/common.hpp"
#include "cropforge/benchmark.hpp"
#include "cropforge/evaluation.hpp"
#include "cropforge/io.hpp"

namespace cropforge::cli {

namespace {

struct EvaluateArgs {
  std::string config, calibration, weather_dir, soil, out, bounds;
  std::vector<std::string> strategies;
  int target = 0;
  std::uint64_t seed = 0;
  int history = 0;
  std::string weighting = "inverse";
  std::size_t jobs = 0;
  SeasonCalendar calendar;
};

std::vector<Strategy> parse_strategies(const std::vector<std::string>& names) {
  std::vector<Strategy> out;
  for (const std::string& n : names) {
    if (n == "all") {
      for (Strategy s : {Strategy::AllPrevious, Strategy::PreviousYear, Strategy::Mean, Strategy::Quality}) {
        out.push_back(s);
      }
      continue;
    }
    const auto s = parse_strategy(n);
    if (!s) throw UsageError("unknown strategy '" + n + "' (all-previous, previous-year, mean, quality, all)");
    out.push_back(*s);
  }
  return out;
}

QualityWeighting parse_weighting(const std::string& w) {
  if (w == "inverse") return QualityWeighting::InverseQ;
  if (w == "literal") return QualityWeighting::LiteralQ;
  throw UsageError("--weighting must be inverse or literal");
}

std::string lat_lon(const FieldMatrix& f) {
  return number(static_cast<double>(f.lat_e4) / 1e4) + "," + number(static_cast<double>(f.lon_e4) / 1e4);
}

void run_evaluate(Session& s, CLI::App& app, EvaluateArgs& a) {
  apply_config(app, a.config);
  require(app, {"--calibration", "--weather-dir", "--soil", "--strategy", "--target-year", "--out"});
  const std::vector<Strategy> strategies = parse_strategies(a.strategies);
  RegionOptions options;
  options.seed = resolve_seed(app, a.seed);
  options.quality.weighting = parse_weighting(a.weighting);
  if (app.get_option("--history")->count() > 0) {
    if (a.history < 1) throw UsageError("--history must be >= 1");
    options.history = a.history;
  }
  const std::size_t jobs = resolve_jobs(a.jobs);

  const CalibrationDB db = read_calibration_db(read_input(a.calibration, "calibration"));
  const SoilProfile soil = load_soil(a.soil);
  WeatherDirectory weather(a.weather_dir);
  EvaluationSetup setup;
  setup.calendar = a.calendar;
  setup.bounds = load_bounds(a.bounds);

  std::set<int> years;
  std::size_t most_prior = 0;
  for (const auto& [county, by_year] : db) {
    std::size_t prior = 0;
    for (const auto& [year, _] : by_year) {
      if (year < a.target && (!options.history || year >= a.target - *options.history)) {
        years.insert(year);
        ++prior;
      }
    }
    most_prior = std::max(most_prior, prior);
  }
  if (most_prior == 0) {
    throw UsageError("no calibrated year before target " + std::to_string(a.target) + " in " + a.calibration);
  }
  for (Strategy st : strategies) {
    if (st == Strategy::Quality && most_prior < 2) {
      throw UsageError("strategy quality needs at least two calibrated years before the target (found " +
                       std::to_string(most_prior) + "): Q of a model is scored on later pre-target years");
    }
  }
  years.insert(a.target);
  const std::vector<int> eval_years(years.begin(), years.end());

  const auto counties = build_prediction_matrices(
      db, eval_years,
      [&weather](const std::string& county, double lat, double lon) -> const WeatherSeries& {
        return weather.lookup(county, lat, lon);
      },
      soil, setup, jobs);

  std::ostringstream table, pairs, quality, fields;
  table << "county,year,strategy,mean,std\n";
  pairs << "county,lat,lon,calibration_year,evaluation_year,predicted\n";
  quality << "county,lat,lon,calibration_year,q,weight,predicted\n";
  fields << "county,lat,lon,year,strategy,predicted,observed\n";
  bool any_quality = false;
  for (const CountyMatrices& c : counties) {
    for (const FieldMatrix& f : c.fields) {
      for (const auto& [key, v] : f.matrix.values()) {
        pairs << c.county << "," << lat_lon(f) << "," << key.first << "," << key.second << "," << number(v) << "\n";
      }
    }
    for (Strategy st : strategies) {
      const RegionPrediction r = predict_region(c, st, a.target, options);
      table << c.county << "," << a.target << "," << strategy_name(st) << "," << number(r.mean) << ","
            << number(r.std) << "\n";
      for (const FieldMatrix& f : c.fields) {
        const PredictionMatrix m =
            options.history ? f.matrix.restricted_to_history(a.target, *options.history) : f.matrix;
        double predicted = 0.0;
        try {
          predicted = ensemble_predict(st, m, a.target, f.observed, options.seed, options.quality);
        } catch (const ValidationError&) {
          continue;
        }
        const auto obs = f.observed.find(a.target);
        fields << c.county << "," << lat_lon(f) << "," << a.target << "," << strategy_name(st) << ","
               << number(predicted) << "," << (obs == f.observed.end() ? "" : number(obs->second)) << "\n";
        if (st != Strategy::Quality) continue;
        any_quality = true;
        for (const QualityMember& q : quality_members(m, a.target, f.observed, options.quality)) {
          quality << c.county << "," << lat_lon(f) << "," << q.year << "," << number(q.q) << "," << number(q.weight)
                  << "," << number(q.prediction) << "\n";
        }
      }
    }
  }

  const std::string pairs_path = a.out + ".pairs.csv";
  const std::string fields_path = a.out + ".fields.csv";
  const std::string quality_path = a.out + ".quality.csv";
  write_text_file_atomic(a.out, table.str());
  write_text_file_atomic(pairs_path, pairs.str());
  write_text_file_atomic(fields_path, fields.str());
  Manifest m("evaluate", app, a.config, s);
  m.set("seed", options.seed);
  m.set("jobs", jobs);
  m.input("calibration", a.calibration);
  m.input("weather_dir", a.weather_dir);
  m.input("soil", a.soil);
  m.output("predictions", a.out);
  m.output("pairs", pairs_path);
  m.output("fields", fields_path);
  if (any_quality) {
    write_text_file_atomic(quality_path, quality.str());
    m.output("quality", quality_path);
  }
  m.write(a.out);
  s.out << table.str();
}

struct BenchmarkArgs {
  std::string config, soil, out, export_dir;
  std::size_t seeds = 100;
  std::size_t jobs = 0;
  std::uint64_t seed = 0;
  BenchmarkConfig bench;
};

void run_benchmark_cmd(Session& s, CLI::App& app, BenchmarkArgs& a) {
  apply_config(app, a.config);
  require(app, {"--soil", "--out"});
  if (app.get_option("--seed")->count() > 0) a.bench.seed = a.seed;
  const std::size_t jobs = resolve_jobs(a.jobs);
  const SoilProfile soil = load_soil(a.soil);
  const BenchmarkReport r = run_benchmark(a.bench, soil, jobs, a.seeds);

  std::ostringstream table, history;
  table << "strategy,field_mape,county_mape\n";
  for (Strategy st : {Strategy::Quality, Strategy::Mean, Strategy::PreviousYear, Strategy::AllPrevious}) {
    table << strategy_name(st) << "," << fixed(r.mape.at(st), 4) << ","
          << fixed(r.county_mape.at(st), 4) << "\n";
  }
  history << "history,quality_mape\n";
  for (const auto& [h, v] : r.quality_by_history) history << h << "," << fixed(v, 4) << "\n";

  const std::string history_path = a.out + ".history.csv";
  write_text_file_atomic(a.out, table.str());
  write_text_file_atomic(history_path, history.str());
  Manifest m("benchmark", app, a.config, s);
  m.set("seed", a.bench.seed);
  m.set("jobs", jobs);
  m.input("soil", a.soil);
  m.output("table", a.out);
  m.output("history", history_path);
  m.set("calibrated", r.calibrated);
  m.set("failed", r.failed);
  m.set("targets", r.targets);

  if (!a.export_dir.empty()) {
    const BenchmarkData data = make_benchmark(a.bench, soil);
    const fs::path dir(a.export_dir);
    fs::create_directories(dir / "weather");
    std::vector<YieldRecord> records;
    for (const FieldObservation& o : data.observations) records.push_back(o.record);
    write_text_file_atomic(dir / "yields.csv", write_yield_records(records));
    for (const auto& [stem, series] : data.field_weather) {
      write_text_file_atomic(dir / "weather" / (stem + ".wth"), write_weather(series));
    }
    write_text_file_atomic(dir / "soil.json", write_soil(soil));
    write_text_file_atomic(dir / "calibration.json", write_calibration_db(r.db));
    m.output("export", a.export_dir);
  }
  m.write(a.out);
  s.out << table.str() << history.str();
}

}  // namespace

void register_evaluate(CLI::App& root, Registry& registry) {
  auto args = std::make_shared<EvaluateArgs>();
  EvaluateArgs& a = *args;
  CLI::App* app = root.add_subcommand("evaluate", "predict a target year from earlier calibrations");
  add_config_option(*app, a.config);
  app->add_option("--calibration", a.calibration, "calibration database JSON");
  app->add_option("--weather-dir", a.weather_dir, "directory of .wth files");
  app->add_option("--soil", a.soil, "soil profile JSON");
  app->add_option("--strategy", a.strategies, "all-previous, previous-year, mean, quality or all; repeatable");
  app->add_option("--target-year", a.target, "year to predict");
  app->add_option("--out", a.out, "per-county predictions CSV");
  app->add_option("--seed", a.seed, "all-previous pick seed");
  app->add_option("--history", a.history, "use only the last N calibration years");
  app->add_option("--weighting", a.weighting, "quality weights: inverse (1/Q) or literal (Q)")->capture_default_str();
  app->add_option("--jobs", a.jobs, "worker threads (0: all cores)");
  app->add_option("--bounds", a.bounds, "genetic coefficient bounds JSON");
  add_calendar_options(*app, a.calendar);
  registry.push_back({app, [app, args](Session& s) { run_evaluate(s, *app, *args); }});
}

void register_benchmark(CLI::App& root, Registry& registry) {
  auto args = std::make_shared<BenchmarkArgs>();
  BenchmarkArgs& a = *args;
  CLI::App* app = root.add_subcommand("benchmark", "ensemble strategies on the synthetic drift region");
  add_config_option(*app, a.config);
  app->add_option("--soil", a.soil, "soil profile JSON");
  app->add_option("--out", a.out, "strategy MAPE table CSV");
  app->add_option("--seeds", a.seeds, "all-previous seeds to average")->capture_default_str();
  app->add_option("--jobs", a.jobs, "worker threads (0: all cores)");
  app->add_option("--seed", a.seed, "world seed (default 2024)");
  app->add_option("--fields", a.bench.fields_per_county, "fields per county")->capture_default_str();
  app->add_option("--counties", a.bench.counties, "counties")->capture_default_str();
  app->add_option("--export", a.export_dir, "also write yields, weather, soil and calibration here");
  registry.push_back({app, [app, args](Session& s) { run_benchmark_cmd(s, *app, *args); }});
}

}  // namespace cropforge::cli
