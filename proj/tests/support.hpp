#pragma once

#include <filesystem>
#include <string>
#include <unistd.h>

#include "cropforge/io.hpp"
#include "cropforge/types.hpp"

namespace cropforge::test {

inline std::filesystem::path data_path(const std::string& rel) {
  return std::filesystem::path(CROPFORGE_DATA_DIR) / rel;
}

inline SoilProfile default_soil() { return read_soil(read_text_file(data_path("soil_default.json"))); }

/// Fresh scratch directory, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag)
      : path_(std::filesystem::temp_directory_path() /
              ("cropforge_" + tag + "_" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// Constant weather from `start` for `days` days.
inline WeatherSeries constant_weather(Date start, int days, double srad, double tmax, double tmin, double rain) {
  WeatherSeries s;
  Date d = start;
  for (int i = 0; i < days; ++i, d = next_day(d)) s.records.push_back({d.year, d.doy, srad, tmax, tmin, rain});
  return s;
}

}  // namespace cropforge::test
