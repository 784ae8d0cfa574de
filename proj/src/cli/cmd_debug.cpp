#include <sstream>

#include "cli/common.hpp"
#include "cropforge/io.hpp"
#include "cropforge/sampling.hpp"

namespace cropforge::cli {

namespace {

struct SimulateArgs {
  std::string config, weather, soil, out, bounds;
  std::vector<double> genetics;
  int year = 0;
  SeasonCalendar calendar;
};

void run_simulate(Session& s, CLI::App& app, SimulateArgs& a) {
  apply_config(app, a.config);
  require(app, {"--weather", "--soil", "--year"});
  GeneticCoefficients g = midpoint_coefficients(load_bounds(a.bounds));
  if (!a.genetics.empty()) g.values = a.genetics;
  g.validate();
  const WeatherSeries weather = parse_weather(read_input(a.weather, "weather"));
  const SoilProfile soil = load_soil(a.soil);
  const SimulationOutput r = simulate(plan_for_season(a.calendar, a.year, g), weather, g, soil);

  if (!a.out.empty()) {
    std::ostringstream csv;
    csv << "day,year,doy,lai,biomass\n";
    for (std::size_t d = 0; d < r.lai_series.size(); ++d) {
      const Date date = add_days(r.start, static_cast<int>(d));
      csv << d << "," << date.year << "," << date.doy << "," << number(r.lai_series[d]) << ","
          << number(r.biomass_series[d]) << "\n";
    }
    write_text_file_atomic(a.out, csv.str());
  }
  s.out << "yield " << fixed(r.yield_kg_ha, 1) << " kg/ha, " << r.lai_series.size() << " days";
  if (r.maturity_doy) s.out << ", maturity doy " << *r.maturity_doy;
  s.out << "\n";
}

struct GenWeatherArgs {
  std::string config, space, out;
  std::vector<double> params;
  SeasonWindow season{2018, 120, 180};
  std::uint64_t seed = 0;
};

void run_gen_weather(Session& s, CLI::App& app, GenWeatherArgs& a) {
  apply_config(app, a.config);
  require(app, {"--out"});
  a.season.validate();
  ParameterSpace space = default_parameter_space();
  if (!a.space.empty()) space = parse_parameter_space(read_input(a.space, "space"), default_genetic_bounds());
  std::vector<double> params(space.weather_base.values.begin(), space.weather_base.values.end());
  if (!a.params.empty()) {
    if (a.params.size() != kWeatherParameters) {
      throw UsageError("--params needs " + std::to_string(kWeatherParameters) + " values");
    }
    params = a.params;
  }
  const WeatherSeries w = synthesize_daily_weather(params, a.season, resolve_seed(app, a.seed), space.noise);
  write_text_file_atomic(a.out, write_weather(w));
  s.out << "wrote " << w.records.size() << " days -> " << a.out << "\n";
}

}  // namespace

void register_simulate(CLI::App& root, Registry& registry) {
  auto args = std::make_shared<SimulateArgs>();
  SimulateArgs& a = *args;
  CLI::App* app = root.add_subcommand("simulate", "one simulator run, for debugging");
  add_config_option(*app, a.config);
  app->add_option("--weather", a.weather, ".wth file");
  app->add_option("--soil", a.soil, "soil profile JSON");
  app->add_option("--year", a.year, "season year");
  app->add_option("--genetics", a.genetics, "18 normalized coefficients (default: midpoints)")->delimiter(',');
  app->add_option("--bounds", a.bounds, "genetic coefficient bounds JSON");
  app->add_option("--out", a.out, "daily LAI and biomass CSV");
  add_calendar_options(*app, a.calendar);
  registry.push_back({app, [app, args](Session& s) { run_simulate(s, *app, *args); }});
}

void register_gen_weather(CLI::App& root, Registry& registry) {
  auto args = std::make_shared<GenWeatherArgs>();
  GenWeatherArgs& a = *args;
  CLI::App* app = root.add_subcommand("gen-weather", "synthesize one season of daily weather");
  add_config_option(*app, a.config);
  app->add_option("--space", a.space, "weather space JSON (default: built-in)");
  app->add_option("--params", a.params, "15 seasonal aggregates (default: space base)")->delimiter(',');
  app->add_option("--season-start", a.season.start_doy, "first day of year")->capture_default_str();
  app->add_option("--season-days", a.season.length_days, "days")->capture_default_str();
  app->add_option("--season-year", a.season.year, "year")->capture_default_str();
  app->add_option("--seed", a.seed, "noise seed");
  app->add_option("--out", a.out, ".wth file to write");
  registry.push_back({app, [app, args](Session& s) { run_gen_weather(s, *app, *args); }});
}

}  // namespace cropforge::cli
