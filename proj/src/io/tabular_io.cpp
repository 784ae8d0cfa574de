#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "cropforge/error.hpp"
#include "cropforge/io.hpp"
#include "io/text_util.hpp"

namespace cropforge {

namespace {

constexpr std::string_view kYieldHeader = "year,lat,lon,fips,yield,state,county";

std::string row_prefix(std::size_t row) { return "row " + std::to_string(row) + ": "; }

void check_text_field(const std::string& value, const char* name) {
  if (value.find_first_of(",\"\r\n") != std::string::npos) {
    throw ValidationError(std::string(name) + " '" + value +
                          "' contains a comma, quote or newline");
  }
}

}  // namespace

std::string format_number(double value, int min_decimals) {
  if (!std::isfinite(value)) throw ValidationError("cannot format non-finite number");
  char buf[64];
  // Plain decimal for ordinary magnitudes; scientific only for extremes.
  const double mag = std::abs(value);
  const bool plain = value == 0.0 || (mag >= 1e-9 && mag < 1e16);
  const auto res = plain ? std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed)
                         : std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, res.ptr);
  if (s.find_first_of("eE") != std::string::npos || min_decimals <= 0) return s;
  const std::size_t dot = s.find('.');
  int have = dot == std::string::npos ? 0 : static_cast<int>(s.size() - dot - 1);
  if (dot == std::string::npos) s += '.';
  for (; have < min_decimals; ++have) s += '0';
  return s;
}

void validate_yield_record(const YieldRecord& r) {
  if (!(r.lat >= -90.0 && r.lat <= 90.0)) throw ValidationError("latitude out of range");
  if (!(r.lon >= -180.0 && r.lon <= 180.0)) throw ValidationError("longitude out of range");
  if (!(r.yield_kg_ha > 0.0) || !std::isfinite(r.yield_kg_ha)) {
    throw ValidationError("yield must be positive");
  }
}

std::vector<YieldRecord> parse_yield_records(std::string_view text) {
  std::vector<YieldRecord> out;
  const auto lines = detail::split_lines(text);
  std::size_t row = 0;
  bool seen_header = false;
  for (std::string_view raw : lines) {
    ++row;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    if (!seen_header) {
      std::string normalized;
      for (char c : line)
        if (c != ' ' && c != '\t') normalized += c;
      if (normalized != kYieldHeader) {
        throw ParseError(row_prefix(row) + "expected header '" + std::string(kYieldHeader) + "'",
                         row, std::string(line));
      }
      seen_header = true;
      continue;
    }
    const auto cells = detail::split_csv(line);
    if (cells.size() != 7) {
      throw ParseError(row_prefix(row) + "expected 7 columns, got " + std::to_string(cells.size()),
                       row, std::string(line));
    }
    YieldRecord r;
    std::int64_t year = 0;
    if (!detail::try_parse_int(cells[0], year) || year < 1000 || year > 9999) {
      throw ParseError(row_prefix(row) + "malformed year '" + std::string(cells[0]) + "'", row,
                       std::string(cells[0]));
    }
    r.year = static_cast<int>(year);
    r.lat = detail::parse_double_token(cells[1], row, "row");
    r.lon = detail::parse_double_token(cells[2], row, "row");
    if (!detail::try_parse_int(cells[3], r.fips)) {
      throw ParseError(row_prefix(row) + "malformed fips '" + std::string(cells[3]) + "'", row,
                       std::string(cells[3]));
    }
    r.yield_kg_ha = detail::parse_double_token(cells[4], row, "row");
    r.state = std::string(detail::trim(cells[5]));
    r.county = std::string(detail::trim(cells[6]));
    if (r.county.empty()) throw ParseError(row_prefix(row) + "empty county", row);
    try {
      validate_yield_record(r);
    } catch (const ValidationError& e) {
      throw ParseError(row_prefix(row) + e.what(), row, std::string(cells[4]));
    }
    out.push_back(std::move(r));
  }
  if (!seen_header) throw ParseError("yield table has no header line", 0);
  return out;
}

std::string write_yield_records(std::span<const YieldRecord> records) {
  std::string out(kYieldHeader);
  out += '\n';
  for (const YieldRecord& r : records) {
    validate_yield_record(r);
    check_text_field(r.state, "state");
    check_text_field(r.county, "county");
    out += std::to_string(r.year);
    out += ',' + format_number(r.lat, 3);
    out += ',' + format_number(r.lon, 3);
    out += ',' + std::to_string(r.fips);
    out += ',' + format_number(r.yield_kg_ha);
    out += ',' + r.state;
    out += ',' + r.county;
    out += '\n';
  }
  return out;
}

std::string feature_column_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "x%02zu", index);
  return buf;
}

SurrogateDataset read_dataset(std::string_view text) {
  SurrogateDataset ds;
  bool seen_header = false;
  std::size_t row = 0;
  for (std::string_view raw : detail::split_lines(text)) {
    ++row;
    const std::string_view line = detail::trim(raw);
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (!seen_header) {
      if (cells.size() < 2 || detail::trim(cells.back()) != "yield") {
        throw ParseError("row 1: dataset header must end with 'yield'", row, std::string(line));
      }
      for (std::size_t i = 0; i + 1 < cells.size(); ++i) {
        if (detail::trim(cells[i]) != feature_column_name(i)) {
          throw ParseError("row 1: expected column '" + feature_column_name(i) + "'", row,
                           std::string(cells[i]));
        }
      }
      ds.n_features = cells.size() - 1;
      seen_header = true;
      continue;
    }
    if (cells.size() != ds.n_features + 1) {
      throw ParseError(row_prefix(row) + "expected " + std::to_string(ds.n_features + 1) +
                           " columns, got " + std::to_string(cells.size()),
                       row, std::string(line));
    }
    for (std::size_t i = 0; i < ds.n_features; ++i) {
      ds.features.push_back(detail::parse_double_token(cells[i], row, "row"));
    }
    ds.yields.push_back(detail::parse_double_token(cells.back(), row, "row"));
  }
  if (!seen_header) throw ParseError("dataset has no header line", 0);
  return ds;
}

std::string write_dataset(const SurrogateDataset& ds) {
  if (ds.features.size() != ds.rows() * ds.n_features) {
    throw ValidationError("dataset feature matrix does not match row count");
  }
  std::string out;
  for (std::size_t i = 0; i < ds.n_features; ++i) out += feature_column_name(i) + ',';
  out += "yield\n";
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    const double* x = ds.row(r);
    for (std::size_t i = 0; i < ds.n_features; ++i) {
      out += format_number(x[i]);
      out += ',';
    }
    out += format_number(ds.yields[r]);
    out += '\n';
  }
  return out;
}

}  // namespace cropforge
