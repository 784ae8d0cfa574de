#include "cli/common.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "cropforge/io.hpp"
#include "cropforge/parallel.hpp"

namespace cropforge::cli {

namespace {

bool is_plumbing(const CLI::Option* opt) {
  const auto& names = opt->get_lnames();
  return names.empty() || names[0] == "help" || names[0] == "config" || names[0] == "version";
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_unsigned()) return std::to_string(v.get<unsigned long long>());
  if (v.is_number_float()) return format_number(v.get<double>());
  throw UsageError("config values must be strings, numbers, booleans or arrays of them");
}

}  // namespace

void add_config_option(CLI::App& app, std::string& path) {
  app.add_option("--config", path, "JSON file of option values (flags override it)");
}

void apply_config(CLI::App& app, const std::string& path) {
  if (path.empty()) return;
  json doc;
  try {
    doc = json::parse(read_input(path, "config"));
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config " + path + ": expected a JSON object");

  json values = json::object();
  if (doc.contains("options") && doc.contains("command")) {
    // A run manifest: replay its resolved options.
    values = doc["options"];
  } else {
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (!it.value().is_object()) values[it.key()] = it.value();
    }
    if (doc.contains(app.get_name()) && doc[app.get_name()].is_object()) {
      for (auto& [k, v] : doc[app.get_name()].items()) values[k] = v;
    }
  }

  for (CLI::Option* opt : app.get_options()) {
    if (is_plumbing(opt) || opt->count() > 0) continue;
    const auto it = values.find(opt->get_lnames()[0]);
    if (it == values.end()) continue;
    if (it->is_array()) {
      for (const json& v : *it) opt->add_result(scalar_text(v));
    } else {
      opt->add_result(scalar_text(*it));
    }
    try {
      opt->run_callback();
    } catch (const CLI::ParseError& e) {
      throw UsageError("config " + path + ": --" + opt->get_lnames()[0] + ": " + e.what());
    }
  }
}

json resolved_options(const CLI::App& app) {
  json out = json::object();
  for (const CLI::Option* opt : app.get_options()) {
    if (is_plumbing(opt) || opt->count() == 0) continue;
    const auto& results = opt->results();
    if (results.size() == 1 && opt->get_expected_max() <= 1) {
      out[opt->get_lnames()[0]] = results[0];
    } else {
      out[opt->get_lnames()[0]] = results;
    }
  }
  return out;
}

void require(const CLI::App& app, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    if (app.get_option(name)->count() == 0) throw UsageError(std::string("missing required option ") + name);
  }
}

std::uint64_t resolve_seed(const CLI::App& app, std::uint64_t flag_value) {
  if (app.get_option("--seed")->count() > 0) return flag_value;
  if (const char* env = std::getenv("CROPFORGE_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || env[0] == '-') throw UsageError(std::string("CROPFORGE_SEED is not a seed: ") + env);
    return v;
  }
  return 0;
}

std::size_t resolve_jobs(std::size_t jobs) { return jobs == 0 ? default_worker_count() : jobs; }

std::string read_input(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string("no ") + what + " file given");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw UsageError(std::string(what) + " file not found: " + path);
  return read_text_file(path);
}

SoilProfile load_soil(const std::string& path) { return read_soil(read_input(path, "soil")); }

std::vector<CoefficientBound> load_bounds(const std::string& path) {
  if (path.empty()) return default_genetic_bounds();
  return parse_genetic_bounds(read_input(path, "bounds"));
}

void add_calendar_options(CLI::App& app, SeasonCalendar& calendar) {
  app.add_option("--planting-doy", calendar.planting_doy, "nominal planting day of year")
      ->check(CLI::Range(1, 366));
  app.add_option("--harvest-doy", calendar.harvest_doy, "nominal harvest day of year")->check(CLI::Range(1, 366));
  app.add_flag("--harvest-at-maturity", calendar.harvest_at_maturity, "ignore the harvest date");
}

WeatherDirectory::WeatherDirectory(const std::string& dir) : dir_(dir) {
  std::error_code ec;
  if (dir.empty() || !fs::is_directory(dir_, ec)) throw UsageError("weather directory not found: " + dir);
}

const WeatherSeries& WeatherDirectory::lookup(const std::string& county, double lat, double lon) {
  const std::string stem = field_weather_stem(county, lat, lon);
  std::lock_guard lock(mutex_);
  for (const std::string& name : {stem, county}) {
    const fs::path path = dir_ / (name + ".wth");
    const std::string key = path.string();
    if (const auto it = cache_.find(key); it != cache_.end()) return *it->second;
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) continue;
    auto series = std::make_unique<WeatherSeries>(parse_weather(read_text_file(path), name));
    return *cache_.emplace(key, std::move(series)).first->second;
  }
  throw ValidationError("no weather for " + county + " field at " + format_number(lat) + "," + format_number(lon) +
                        ": neither " + stem + ".wth nor " + county + ".wth in " + dir_.string());
}

std::vector<std::string> WeatherDirectory::files_read() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [path, _] : cache_) out.push_back(path);
  return out;
}

WeatherSeries season_slice(const WeatherSeries& series, int year) {
  WeatherSeries out;
  out.station_id = series.station_id;
  for (const WeatherRecord& r : series.records) {
    if (r.year == year || r.year == year + 1) out.records.push_back(r);
  }
  return out;
}

Manifest::Manifest(std::string command, const CLI::App& app, std::string config_path, const Session& session)
    : start_(session.start) {
  doc_["command"] = std::move(command);
  doc_["config"] = config_path.empty() ? json(nullptr) : json(config_path);
  doc_["version"] = CROPFORGE_VERSION;
  doc_["inputs"] = json::object();
  doc_["outputs"] = json::object();
  doc_["options"] = resolved_options(app);
}

void Manifest::input(const std::string& role, const std::string& path) { doc_["inputs"][role] = path; }
void Manifest::output(const std::string& role, const std::string& path) { doc_["outputs"][role] = path; }

void Manifest::set(const std::string& key, json value) {
  if (key == "seed") doc_["options"]["seed"] = value.dump();
  doc_[key] = std::move(value);
}

void Manifest::write(const fs::path& primary) const {
  json doc = doc_;
  doc["duration_s"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  fs::path path = primary;
  path += ".manifest.json";
  write_text_file_atomic(path, doc.dump(2) + "\n");
}

std::string number(double v) { return format_number(v); }

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace cropforge::cli
