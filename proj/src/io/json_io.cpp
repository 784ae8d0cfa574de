#include <cmath>
#include <string>

#include <json.hpp>

#include "cropforge/error.hpp"
#include "cropforge/io.hpp"

namespace cropforge {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

json parse_json(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what(), 0);
  }
}

double number_at(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ParseError(where + ": missing numeric field '" + key + "'");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite '" + key + "'");
  return v;
}

bool is_four_digit_year(const std::string& s) {
  if (s.size() != 4) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return s[0] != '0';
}

std::string quoted(const std::string& s) { return json(s).dump(); }

}  // namespace

void validate_calibration_entry(const CalibrationEntry& e, const std::string& where) {
  for (std::size_t i = 0; i < e.calibration_values.size(); ++i) {
    const double v = e.calibration_values[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError(where + ": calibration value " + std::to_string(i) +
                            " outside [0,1]");
    }
  }
  if (!(e.calibration_cost >= 0.0) || !std::isfinite(e.calibration_cost)) {
    throw ValidationError(where + ": calibration_cost must be non-negative");
  }
  if (!std::isfinite(e.latitude) || !std::isfinite(e.longitude) ||
      !std::isfinite(e.measured_yield)) {
    throw ValidationError(where + ": non-finite location");
  }
}

CalibrationDB read_calibration_db(std::string_view text) {
  const json root = parse_json(text, "calibration db");
  if (!root.is_object()) throw ParseError("calibration db: root must be an object");
  CalibrationDB db;
  for (const auto& [county, years] : root.items()) {
    if (!years.is_object()) throw ParseError("calibration db: county '" + county + "' must map years");
    auto& county_map = db[county];
    for (const auto& [year_key, entries] : years.items()) {
      const std::string where = county + "/" + year_key;
      if (!is_four_digit_year(year_key)) throw ParseError(where + ": year keys must be 4-digit");
      if (!entries.is_array() || entries.empty()) {
        throw ParseError(where + ": expected a non-empty list of entries");
      }
      auto& list = county_map[std::stoi(year_key)];
      for (std::size_t idx = 0; idx < entries.size(); ++idx) {
        const json& item = entries[idx];
        const std::string item_where = where + "[" + std::to_string(idx) + "]";
        if (!item.is_object()) throw ParseError(item_where + ": entry must be an object");
        CalibrationEntry e;
        const auto values = item.find("calibration_values");
        if (values == item.end() || !values->is_array()) {
          throw ParseError(item_where + ": missing calibration_values");
        }
        for (const json& v : *values) {
          if (!v.is_number()) throw ParseError(item_where + ": calibration_values must be numbers");
          e.calibration_values.push_back(v.get<double>());
        }
        e.calibration_cost = number_at(item, "calibration_cost", item_where);
        const auto loc = item.find("location");
        if (loc == item.end() || !loc->is_object()) throw ParseError(item_where + ": missing location");
        e.latitude = number_at(*loc, "latitude", item_where);
        e.longitude = number_at(*loc, "longitude", item_where);
        e.measured_yield = number_at(*loc, "measured_yield", item_where);
        validate_calibration_entry(e, item_where);
        list.push_back(std::move(e));
      }
    }
  }
  return db;
}

std::string write_calibration_db(const CalibrationDB& db) {
  if (db.empty()) return "{}";
  std::string out = "{\n";
  bool first_county = true;
  for (const auto& [county, years] : db) {
    if (!first_county) out += ",\n";
    first_county = false;
    out += "    " + quoted(county) + ": {\n";
    bool first_year = true;
    for (const auto& [year, entries] : years) {
      const std::string where = county + "/" + std::to_string(year);
      if (year < 1000 || year > 9999) throw ValidationError(where + ": year must be 4-digit");
      if (entries.empty()) throw ValidationError(where + ": empty entry list");
      if (!first_year) out += ",\n";
      first_year = false;
      out += "        \"" + std::to_string(year) + "\": [{\n";
      for (std::size_t k = 0; k < entries.size(); ++k) {
        const CalibrationEntry& e = entries[k];
        validate_calibration_entry(e, where);
        if (k > 0) out += "        }, {\n";
        if (e.calibration_values.empty()) {
          out += "            \"calibration_values\": [],\n";
        } else {
          out += "            \"calibration_values\": [\n";
          for (std::size_t i = 0; i < e.calibration_values.size(); i += 2) {
            out += "                " + format_number(e.calibration_values[i], 4);
            if (i + 1 < e.calibration_values.size()) {
              out += ", " + format_number(e.calibration_values[i + 1], 4);
            }
            out += i + 2 < e.calibration_values.size() ? ",\n" : "\n";
          }
          out += "            ],\n";
        }
        out += "            \"calibration_cost\": " + format_number(e.calibration_cost, 4) + ",\n";
        out += "            \"location\": {\n";
        out += "                \"latitude\": " + format_number(e.latitude, 4) + ",\n";
        out += "                \"longitude\": " + format_number(e.longitude, 4) + ",\n";
        out += "                \"measured_yield\": " + format_number(e.measured_yield, 1) + "\n";
        out += "            }\n";
      }
      out += "        }]";
    }
    out += "\n    }";
  }
  out += "\n}";
  return out;
}

double SoilProfile::mean_clay() const noexcept {
  if (layers.empty()) return 0.0;
  double sum = 0.0;
  for (const SoilLayer& l : layers) sum += l.clay;
  return sum / static_cast<double>(layers.size());
}

void validate_soil(const SoilProfile& p) {
  if (p.layers.size() != kSoilDepthsCm.size()) {
    throw ValidationError("expected 7 layers, got " + std::to_string(p.layers.size()));
  }
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    const SoilLayer& l = p.layers[i];
    const std::string where = "soil layer at " + std::to_string(l.depth_cm) + " cm";
    if (l.depth_cm != kSoilDepthsCm[i]) {
      throw ValidationError("soil layer " + std::to_string(i) + " must be at depth " +
                            std::to_string(kSoilDepthsCm[i]) + " cm");
    }
    for (double v : {l.clay, l.silt, l.sand, l.bulk_density, l.coarse_fragments, l.cec,
                     l.organic_carbon, l.ph_h2o, l.ph_kcl}) {
      if (!std::isfinite(v) || v < 0.0) throw ValidationError(where + ": values must be finite and >= 0");
    }
    if (l.ph_h2o > 14.0 || l.ph_kcl > 14.0) throw ValidationError(where + ": pH outside [0,14]");
    const double texture = l.clay + l.silt + l.sand;
    if (texture < 99.0 || texture > 101.0) {
      throw ValidationError(where + ": texture sums to " + format_number(texture));
    }
  }
}

SoilProfile read_soil(std::string_view text) {
  const json root = parse_json(text, "soil profile");
  if (!root.is_object()) throw ParseError("soil profile: root must be an object");
  const auto layers = root.find("layers");
  if (layers == root.end() || !layers->is_array()) throw ParseError("soil profile: missing 'layers' array");
  SoilProfile p;
  for (std::size_t i = 0; i < layers->size(); ++i) {
    const json& obj = (*layers)[i];
    const std::string where = "soil layer " + std::to_string(i);
    if (!obj.is_object()) throw ParseError(where + ": must be an object");
    SoilLayer l;
    const auto depth = obj.find("depth_cm");
    if (depth == obj.end() || !depth->is_number_integer()) {
      throw ParseError(where + ": missing integer 'depth_cm'");
    }
    l.depth_cm = depth->get<int>();
    l.clay = number_at(obj, "clay", where);
    l.silt = number_at(obj, "silt", where);
    l.sand = number_at(obj, "sand", where);
    l.bulk_density = number_at(obj, "bulk_density", where);
    l.coarse_fragments = number_at(obj, "coarse_fragments", where);
    l.cec = number_at(obj, "cec", where);
    l.organic_carbon = number_at(obj, "organic_carbon", where);
    l.ph_h2o = number_at(obj, "ph_h2o", where);
    l.ph_kcl = number_at(obj, "ph_kcl", where);
    p.layers.push_back(l);
  }
  validate_soil(p);
  return p;
}

std::string write_soil(const SoilProfile& p) {
  validate_soil(p);
  ordered_json layers = ordered_json::array();
  for (const SoilLayer& l : p.layers) {
    ordered_json obj;
    obj["depth_cm"] = l.depth_cm;
    obj["clay"] = l.clay;
    obj["silt"] = l.silt;
    obj["sand"] = l.sand;
    obj["bulk_density"] = l.bulk_density;
    obj["coarse_fragments"] = l.coarse_fragments;
    obj["cec"] = l.cec;
    obj["organic_carbon"] = l.organic_carbon;
    obj["ph_h2o"] = l.ph_h2o;
    obj["ph_kcl"] = l.ph_kcl;
    layers.push_back(std::move(obj));
  }
  ordered_json root;
  root["layers"] = std::move(layers);
  return root.dump(2) + "\n";
}

}  // namespace cropforge
