#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "cropforge/error.hpp"
#include "cropforge/io.hpp"
#include "io/text_util.hpp"

namespace cropforge {

namespace {

constexpr std::array<std::string_view, 5> kWeatherColumns = {"DATE", "SRAD", "TMAX", "TMIN", "RAIN"};

bool header_matches(const std::vector<std::string_view>& tokens) {
  if (tokens.size() < kWeatherColumns.size()) return false;
  for (std::size_t i = 0; i < kWeatherColumns.size(); ++i) {
    std::string_view tok = tokens[i];
    if (i == 0 && !tok.empty() && tok.front() == '@') tok.remove_prefix(1);
    if (!detail::iequals(tok, kWeatherColumns[i])) return false;
  }
  return true;
}

Date parse_date_token(std::string_view tok, std::size_t line) {
  if (tok.size() != 5) {
    throw ParseError("line " + std::to_string(line) + ": DATE must be YYDDD, got '" +
                         std::string(tok) + "'",
                     line, std::string(tok));
  }
  for (char c : tok) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ParseError("line " + std::to_string(line) + ": DATE must be YYDDD, got '" +
                           std::string(tok) + "'",
                       line, std::string(tok));
    }
  }
  const int yy = (tok[0] - '0') * 10 + (tok[1] - '0');
  const int ddd = (tok[2] - '0') * 100 + (tok[3] - '0') * 10 + (tok[4] - '0');
  return {expand_two_digit_year(yy), ddd};
}

}  // namespace

int expand_two_digit_year(int yy) noexcept { return yy >= 70 ? 1900 + yy : 2000 + yy; }

std::string date_label(int year, int doy) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d%03d", ((year % 100) + 100) % 100, doy);
  return buf;
}

void validate_weather_record(const WeatherRecord& r) {
  const std::string label = date_label(r.year, r.doy);
  if (!std::isfinite(r.srad) || !std::isfinite(r.tmax) || !std::isfinite(r.tmin) ||
      !std::isfinite(r.rain)) {
    throw ValidationError("non-finite weather value at " + label);
  }
  if (r.tmax < r.tmin) throw ValidationError("tmax < tmin at " + label);
  if (r.srad < 0.0) throw ValidationError("negative srad at " + label);
  if (r.rain < 0.0) throw ValidationError("negative rain at " + label);
  if (r.doy < 1 || r.doy > 366) throw ValidationError("day-of-year out of range at " + label);
}

WeatherSeries parse_weather(std::string_view text, std::string station_id) {
  WeatherSeries series;
  series.station_id = std::move(station_id);
  bool seen_header = false;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    const auto tokens = detail::split_whitespace(line);
    if (tokens.empty()) continue;
    if (!seen_header) {
      if (!header_matches(tokens)) {
        throw ParseError("line " + std::to_string(line_no) +
                             ": expected header 'DATE SRAD TMAX TMIN RAIN'",
                         line_no, std::string(tokens.front()));
      }
      seen_header = true;
      continue;
    }
    if (tokens.size() < kWeatherColumns.size()) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 5 columns, got " +
                           std::to_string(tokens.size()),
                       line_no, std::string(tokens.back()));
    }
    const Date date = parse_date_token(tokens[0], line_no);
    WeatherRecord rec;
    rec.year = date.year;
    rec.doy = date.doy;
    rec.srad = detail::parse_double_token(tokens[1], line_no);
    rec.tmax = detail::parse_double_token(tokens[2], line_no);
    rec.tmin = detail::parse_double_token(tokens[3], line_no);
    rec.rain = detail::parse_double_token(tokens[4], line_no);
    try {
      validate_weather_record(rec);
    } catch (const ValidationError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no,
                       std::string(tokens[0]));
    }
    if (!series.records.empty() && !(series.records.back().date() < rec.date())) {
      throw ParseError("line " + std::to_string(line_no) + ": dates must be strictly increasing",
                       line_no, std::string(tokens[0]));
    }
    series.records.push_back(rec);
  }
  if (!seen_header) throw ParseError("weather file has no header line", 0);
  return series;
}

std::string write_weather(const WeatherSeries& series) {
  std::string out = "DATE   SRAD  TMAX  TMIN  RAIN\n";
  out.reserve(out.size() + series.records.size() * 30);
  char buf[96];
  for (const WeatherRecord& r : series.records) {
    validate_weather_record(r);
    if (r.year < 1970 || r.year > 2069) {
      throw ValidationError("year " + std::to_string(r.year) +
                            " cannot be written as a two-digit DATE");
    }
    std::snprintf(buf, sizeof buf, "%s %5.1f %5.1f %5.1f %5.1f\n", date_label(r.year, r.doy).c_str(),
                  r.srad, r.tmax, r.tmin, r.rain);
    out += buf;
  }
  return out;
}

}  // namespace cropforge
