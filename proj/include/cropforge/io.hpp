#pragma once

// Readers and writers for every on-disk format. All functions are pure and
// thread-safe; parse failures raise ParseError, invariant violations raise
// ValidationError.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cropforge/types.hpp"

namespace cropforge {

// Daily weather: header `DATE SRAD TMAX TMIN RAIN`, DATE as YYDDD.
WeatherSeries parse_weather(std::string_view text, std::string station_id = {});
std::string write_weather(const WeatherSeries& series);
void validate_weather_record(const WeatherRecord& record);

/// Two-digit year expansion: >= 70 maps to 19xx, else 20xx.
int expand_two_digit_year(int yy) noexcept;
/// YYDDD label for a date, e.g. {2009, 1} -> "09001".
std::string date_label(int year, int doy);

// Yield table CSV: `year,lat,lon,fips,yield,state,county`.
std::vector<YieldRecord> parse_yield_records(std::string_view text);
std::string write_yield_records(std::span<const YieldRecord> records);
void validate_yield_record(const YieldRecord& record);

// Calibration database JSON, county -> year -> [entry].
CalibrationDB read_calibration_db(std::string_view text);
std::string write_calibration_db(const CalibrationDB& db);
void validate_calibration_entry(const CalibrationEntry& entry, const std::string& where);

// Soil profile JSON with seven depth-keyed layers.
SoilProfile read_soil(std::string_view text);
std::string write_soil(const SoilProfile& profile);
void validate_soil(const SoilProfile& profile);

// Surrogate dataset CSV: x00..xNN,yield.
SurrogateDataset read_dataset(std::string_view text);
std::string write_dataset(const SurrogateDataset& dataset);
std::string feature_column_name(std::size_t index);

/// Shortest round-trip decimal for `value`, zero-padded to at least
/// `min_decimals` fractional digits.
std::string format_number(double value, int min_decimals = 0);

// Filesystem helpers.
std::string read_text_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames it into place.
void write_text_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Weather file stem for one field: `<county>_<lat*1e4>_<lon*1e4>`, e.g.
/// "Adams_398428_-912100". A weather directory may hold per-field files
/// under this stem or one `<county>.wth` shared by the whole county.
std::string field_weather_stem(const std::string& county, double lat, double lon);

}  // namespace cropforge
