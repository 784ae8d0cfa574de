#include <charconv>
#include <map>
#include <sstream>

#include "cli/common.hpp"
#include "cropforge/io.hpp"
#include "cropforge/metrics.hpp"

namespace cropforge::cli {

namespace {

// Named columns of a CSV file; blank cells are nullopt.
struct Columns {
  std::map<std::string, std::vector<std::optional<double>>> data;
  std::size_t rows = 0;
};

Columns read_columns(const std::string& path, const char* what) {
  std::istringstream in(read_input(path, what));
  std::string line;
  std::vector<std::string> names;
  Columns out;
  std::size_t lineno = 0;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (names.empty()) {
      names = cells;
      for (const std::string& n : names) out.data[n];
      continue;
    }
    if (cells.size() != names.size()) {
      throw ParseError(path + ": expected " + std::to_string(names.size()) + " columns", lineno, line);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      auto& col = out.data[names[i]];
      if (cells[i].empty()) {
        col.push_back(std::nullopt);
        continue;
      }
      double v = 0.0;
      const auto [p, ec] = std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v);
      col.push_back(ec == std::errc{} && p == cells[i].data() + cells[i].size() ? std::optional(v) : std::nullopt);
    }
    ++out.rows;
  }
  if (names.empty()) throw ParseError(path + ": empty file");
  return out;
}

const std::vector<std::optional<double>>* find_column(const Columns& c, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (const auto it = c.data.find(n); it != c.data.end()) return &it->second;
  }
  return nullptr;
}

template <typename F>
json metric_or_undefined(F&& f) {
  try {
    return f();
  } catch (const ValidationError&) {
    return "undefined";
  } catch (const NumericError&) {
    return "undefined";
  }
}

struct ReportArgs {
  std::string config, pred, obs, out;
};

void run_report(Session& s, CLI::App& app, ReportArgs& a) {
  apply_config(app, a.config);
  require(app, {"--pred", "--obs", "--out"});
  const Columns pred = read_columns(a.pred, "predictions");
  const Columns obs = read_columns(a.obs, "observations");
  const auto* p_col = find_column(pred, {"predicted"});
  if (p_col == nullptr) throw UsageError(a.pred + ": no 'predicted' column");
  const auto* o_col = find_column(obs, {"observed", "yield"});
  if (o_col == nullptr) throw UsageError(a.obs + ": no 'observed' or 'yield' column");
  if (pred.rows != obs.rows) {
    throw UsageError("row counts differ: " + std::to_string(pred.rows) + " predictions, " +
                     std::to_string(obs.rows) + " observations");
  }
  const auto* sigma_col = find_column(pred, {"sigma"});
  const auto* history_col = find_column(pred, {"history"});

  std::vector<double> p, o, sigma, history;
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < pred.rows; ++i) {
    if (!(*p_col)[i] || !(*o_col)[i] || (sigma_col && !(*sigma_col)[i]) || (history_col && !(*history_col)[i])) {
      ++skipped;
      continue;
    }
    p.push_back(*(*p_col)[i]);
    o.push_back(*(*o_col)[i]);
    if (sigma_col) sigma.push_back(*(*sigma_col)[i]);
    if (history_col) history.push_back(*(*history_col)[i]);
  }
  if (p.empty()) throw UsageError("no complete prediction/observation pairs");

  const PairedSeries series{p, o};
  json metrics;
  metrics["n"] = p.size();
  metrics["skipped"] = skipped;
  metrics["correlation"] = metric_or_undefined([&] { return pearson(series); });
  metrics["mape"] = metric_or_undefined([&] { return mape(series); });
  metrics["prmse"] = metric_or_undefined([&] { return prmse(series); });
  metrics["r2"] = metric_or_undefined([&] { return r_squared(series); });
  metrics["rmsep"] = metric_or_undefined([&] { return rmsep(series); });

  const fs::path dir(a.out);
  fs::create_directories(dir);
  Manifest m("report", app, a.config, s);
  m.input("predictions", a.pred);
  m.input("observations", a.obs);

  std::ostringstream scatter;
  scatter << (sigma_col ? "predicted,observed,sigma\n" : "predicted,observed\n");
  for (std::size_t i = 0; i < p.size(); ++i) {
    scatter << number(p[i]) << "," << number(o[i]);
    if (sigma_col) scatter << "," << number(sigma[i]);
    scatter << "\n";
  }
  write_text_file_atomic(dir / "scatter.csv", scatter.str());
  m.output("scatter", (dir / "scatter.csv").string());

  if (sigma_col) {
    std::vector<GaussianForecast> forecasts;
    for (std::size_t i = 0; i < p.size(); ++i) forecasts.push_back({p[i], sigma[i]});
    std::ostringstream rel;
    rel << "nominal,empirical\n";
    json curve = json::array();
    for (const ReliabilityPoint& pt : reliability_curve(forecasts, o, decile_levels())) {
      rel << number(pt.nominal) << "," << number(pt.empirical) << "\n";
      curve.push_back({pt.nominal, pt.empirical});
    }
    metrics["reliability"] = curve;
    write_text_file_atomic(dir / "reliability.csv", rel.str());
    m.output("reliability", (dir / "reliability.csv").string());
  }

  if (history_col) {
    std::map<long long, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto& g = groups[std::llround(history[i])];
      g.first.push_back(p[i]);
      g.second.push_back(o[i]);
    }
    std::ostringstream hist;
    hist << "history,n,mape\n";
    for (const auto& [h, g] : groups) {
      const json v = metric_or_undefined([&] { return mape({g.first, g.second}); });
      hist << h << "," << g.first.size() << "," << (v.is_string() ? v.get<std::string>() : number(v.get<double>()))
           << "\n";
    }
    write_text_file_atomic(dir / "history.csv", hist.str());
    m.output("history", (dir / "history.csv").string());
  }

  write_text_file_atomic(dir / "metrics.json", metrics.dump(2) + "\n");
  m.output("metrics", (dir / "metrics.json").string());
  m.write(dir / "metrics.json");
  s.out << metrics.dump(2) << "\n";
}

}  // namespace

void register_report(CLI::App& root, Registry& registry) {
  auto args = std::make_shared<ReportArgs>();
  ReportArgs& a = *args;
  CLI::App* app = root.add_subcommand("report", "metrics and plot-ready CSVs for predictions");
  add_config_option(*app, a.config);
  app->add_option("--pred", a.pred, "CSV with a predicted column (optional sigma, history)");
  app->add_option("--obs", a.obs, "CSV with an observed or yield column, same row order");
  app->add_option("--out", a.out, "output directory");
  registry.push_back({app, [app, args](Session& s) { run_report(s, *app, *args); }});
}

}  // namespace cropforge::cli
