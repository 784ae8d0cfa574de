#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cropforge/calibration.hpp"
#include "cropforge/crop_model.hpp"
#include "cropforge/error.hpp"
#include "cropforge/types.hpp"

namespace cropforge::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// Bad flags, missing inputs or unmet preconditions: exit code 2.
class UsageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct Session {
  std::ostream& out;
  std::ostream& err;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

/// A registered subcommand: its parser and what to run once parsed.
struct Command {
  CLI::App* app = nullptr;
  std::function<void(Session&)> run;
};

using Registry = std::vector<Command>;

void register_calibrate(CLI::App& root, Registry& registry);
void register_evaluate(CLI::App& root, Registry& registry);
void register_benchmark(CLI::App& root, Registry& registry);
void register_sample(CLI::App& root, Registry& registry);
void register_train(CLI::App& root, Registry& registry);
void register_predict(CLI::App& root, Registry& registry);
void register_report(CLI::App& root, Registry& registry);
void register_simulate(CLI::App& root, Registry& registry);
void register_gen_weather(CLI::App& root, Registry& registry);

/// Adds `--config <json>`. Keys are long option names; a section named after
/// the command overrides top-level keys; a run manifest is accepted too.
void add_config_option(CLI::App& app, std::string& path);
/// Fills options absent from the command line from the config file.
void apply_config(CLI::App& app, const std::string& path);

/// Options given on the command line or through the config file.
json resolved_options(const CLI::App& app);

/// Missing flags are usage errors.
void require(const CLI::App& app, std::initializer_list<const char*> names);

/// Flag or config value, else $CROPFORGE_SEED, else 0.
std::uint64_t resolve_seed(const CLI::App& app, std::uint64_t flag_value);
/// 0 means one worker per logical core.
std::size_t resolve_jobs(std::size_t jobs);

std::string read_input(const std::string& path, const char* what);
SoilProfile load_soil(const std::string& path);
/// Built-in table when `path` is empty.
std::vector<CoefficientBound> load_bounds(const std::string& path);

void add_calendar_options(CLI::App& app, SeasonCalendar& calendar);

/// Weather files in a directory: `<county>_<lat*1e4>_<lon*1e4>.wth` for one
/// field, else `<county>.wth` for the whole county. Parsed once, shared
/// between threads.
class WeatherDirectory {
 public:
  explicit WeatherDirectory(const std::string& dir);
  const WeatherSeries& lookup(const std::string& county, double lat, double lon);
  /// Every file actually read, sorted.
  std::vector<std::string> files_read() const;

 private:
  fs::path dir_;
  mutable std::mutex mutex_;
  std::map<std::string, std::unique_ptr<WeatherSeries>> cache_;
};

/// Records of `year` and `year + 1` from `series`: enough for one season
/// however the calendar offsets fall.
WeatherSeries season_slice(const WeatherSeries& series, int year);

/// Run manifest written next to a command's main output.
class Manifest {
 public:
  Manifest(std::string command, const CLI::App& app, std::string config_path, const Session& session);
  void input(const std::string& role, const std::string& path);
  void output(const std::string& role, const std::string& path);
  void set(const std::string& key, json value);
  /// `<primary>.manifest.json`
  void write(const fs::path& primary) const;

 private:
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

std::string number(double v);
/// Fixed notation with `decimals` digits, for progress and summaries.
std::string fixed(double v, int decimals);

}  // namespace cropforge::cli
