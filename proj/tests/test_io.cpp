#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "cropforge/crop_model.hpp"
#include "cropforge/error.hpp"
#include "cropforge/io.hpp"
#include "cropforge/rng.hpp"
#include "cropforge/sampling.hpp"
#include "support.hpp"

using namespace cropforge;

namespace {

const char* kHeader = "DATE   SRAD  TMAX  TMIN  RAIN\n";

std::string soil_doc(int layers, double clay, double silt, double sand) {
  std::string s = R"({"layers": [)";
  for (int i = 0; i < layers; ++i) {
    if (i) s += ",";
    s += R"({"depth_cm": )" + std::to_string(kSoilDepthsCm[static_cast<std::size_t>(i)]) +
         R"(, "clay": )" + std::to_string(clay) + R"(, "silt": )" + std::to_string(silt) + R"(, "sand": )" +
         std::to_string(sand) +
         R"(, "bulk_density": 1.3, "coarse_fragments": 2, "cec": 20, "organic_carbon": 10, "ph_h2o": 6.5, "ph_kcl": 5.5})";
  }
  return s + "]}";
}

template <typename F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "<no error>";
}

}  // namespace

TEST(Weather, ParsesAppendixLine) {
  const auto s = parse_weather(std::string(kHeader) + "09001   1.1  25.0  18.5  20.7\n");
  ASSERT_EQ(s.records.size(), 1u);
  const WeatherRecord expected{2009, 1, 1.1, 25.0, 18.5, 20.7};
  EXPECT_EQ(s.records[0], expected);
}

TEST(Weather, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(parse_weather(kHeader).records.empty());
  EXPECT_EQ(write_weather({}), "DATE   SRAD  TMAX  TMIN  RAIN\n");
}

TEST(Weather, TmaxBelowTminNamesTheDate) {
  const std::string msg = error_of([] { parse_weather(std::string(kHeader) + "09366 8.8 12.4 21.2 18.4\n"); });
  EXPECT_NE(msg.find("tmax < tmin at 09366"), std::string::npos) << msg;
}

TEST(Weather, MalformedLineCarriesLineAndToken) {
  try {
    parse_weather(std::string(kHeader) + "09001 1.1 25.0 18.5 20.7\n09002 x 25.0 18.5 20.7\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.token(), "x");
  }
}

TEST(Weather, CanonicalLineWidths) {
  WeatherSeries s;
  s.records.push_back({2009, 1, 1.1, 25.0, 18.5, 20.7});
  EXPECT_EQ(write_weather(s), std::string(kHeader) + "09001   1.1  25.0  18.5  20.7\n");
}

TEST(Weather, AppendixFixtureRoundTripsBytes) {
  const std::string text = read_text_file(test::data_path("fixtures/sample_weather.wth"));
  EXPECT_EQ(write_weather(parse_weather(text)), text);
}

TEST(Weather, TwoDigitYearPivot) {
  EXPECT_EQ(expand_two_digit_year(69), 2069);
  EXPECT_EQ(expand_two_digit_year(70), 1970);
  EXPECT_EQ(expand_two_digit_year(9), 2009);
}

TEST(Weather, TrailingColumnsIgnored) {
  const auto s = parse_weather(std::string(kHeader) + "09001 1.1 25.0 18.5 20.7 3.2\n");
  ASSERT_EQ(s.records.size(), 1u);
  EXPECT_DOUBLE_EQ(s.records[0].rain, 20.7);
}

TEST(Weather, SynthesizedSeasonRoundTrips) {
  const auto space = default_parameter_space();
  const auto w = synthesize_daily_weather(space.weather_base.values, {2015, 300, 120}, 7);
  const auto back = parse_weather(write_weather(w));
  ASSERT_EQ(back.records.size(), w.records.size());
  // One decimal on disk; a second write is byte-stable.
  EXPECT_EQ(write_weather(back), write_weather(w));
}

TEST(Yields, ParsesCassRow) {
  const auto r = parse_yield_records("year,lat,lon,fips,yield,state,county\n2013,40.106,-90.000,17017,3537,IL,Cass\n");
  ASSERT_EQ(r.size(), 1u);
  const YieldRecord expected{2013, 40.106, -90.0, 17017, 3537.0, "IL", "Cass"};
  EXPECT_EQ(r[0], expected);
}

TEST(Yields, HeaderOnlyIsEmpty) { EXPECT_TRUE(parse_yield_records("year,lat,lon,fips,yield,state,county\n").empty()); }

TEST(Yields, NonNumericYieldFailsAtRow2) {
  try {
    parse_yield_records("year,lat,lon,fips,yield,state,county\n2013,40.106,-90.000,17017,abc,IL,Cass\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Yields, NonPositiveYieldRejected) {
  EXPECT_THROW(parse_yield_records("year,lat,lon,fips,yield,state,county\n2013,40.1,-90,17017,0,IL,Cass\n"), Error);
}

TEST(Yields, FixtureRoundTripsBytes) {
  const std::string text = read_text_file(test::data_path("fixtures/yields_cass.csv"));
  EXPECT_EQ(write_yield_records(parse_yield_records(text)), text);
}

TEST(CalibrationDb, SampleDocument) {
  const std::string text = read_text_file(test::data_path("fixtures/sample_calibration.json"));
  const CalibrationDB db = read_calibration_db(text);
  const auto& e = db.at("Adams").at(2012).at(0);
  EXPECT_DOUBLE_EQ(e.calibration_cost, 0.0617);
  EXPECT_DOUBLE_EQ(e.latitude, 39.8428);
  EXPECT_DOUBLE_EQ(e.longitude, -91.21);
  EXPECT_DOUBLE_EQ(e.measured_yield, 2737.0);
  EXPECT_EQ(e.calibration_values.size(), 5u);
  EXPECT_EQ(write_calibration_db(db), text);
}

TEST(CalibrationDb, EmptyMap) {
  EXPECT_EQ(write_calibration_db({}), "{}");
  EXPECT_TRUE(read_calibration_db("{}").empty());
}

TEST(CalibrationDb, TwoCountiesRoundTrip) {
  Rng rng(3);
  CalibrationDB db;
  for (const char* county : {"Brown", "Adams"}) {
    for (int year : {2011, 2010}) {
      for (int k = 0; k < 3; ++k) {
        CalibrationEntry e;
        for (int i = 0; i < 18; ++i) e.calibration_values.push_back(rng.uniform());
        e.calibration_values[2] = 0.0;
        e.calibration_values[3] = 1.0;
        e.calibration_cost = rng.uniform(0.0, 0.1);
        e.latitude = 39.0 + rng.uniform();
        e.longitude = -91.0 + rng.uniform();
        e.measured_yield = std::round(rng.uniform(2000, 4000));
        db[county][year].push_back(e);
      }
    }
  }
  const std::string text = write_calibration_db(db);
  EXPECT_EQ(read_calibration_db(text), db);
  EXPECT_EQ(write_calibration_db(read_calibration_db(text)), text);
  EXPECT_LT(text.find("Adams"), text.find("Brown"));
}

TEST(CalibrationDb, OutOfRangeCoefficientNamesWhere) {
  const std::string doc =
      R"({"Cass": {"2014": [{"calibration_values": [0.2, 1.5], "calibration_cost": 0.1,)"
      R"( "location": {"latitude": 40, "longitude": -90, "measured_yield": 3000}}]}})";
  const std::string msg = error_of([&] { read_calibration_db(doc); });
  EXPECT_NE(msg.find("Cass"), std::string::npos) << msg;
  EXPECT_NE(msg.find("2014"), std::string::npos) << msg;
  EXPECT_NE(msg.find("1"), std::string::npos) << msg;
}

TEST(Soil, ValidProfile) {
  const SoilProfile p = read_soil(soil_doc(7, 30, 40, 30));
  EXPECT_EQ(p.layers.size(), 7u);
  EXPECT_EQ(read_soil(write_soil(p)), p);
}

TEST(Soil, SixLayersRejected) {
  EXPECT_NE(error_of([] { read_soil(soil_doc(6, 30, 40, 30)); }).find("expected 7 layers, got 6"), std::string::npos);
}

TEST(Soil, TextureSumChecked) {
  EXPECT_NE(error_of([] { read_soil(soil_doc(7, 80, 40, 30)); }).find("texture sums to 150"), std::string::npos);
}

TEST(Soil, ShippedProfileRoundTrips) {
  const SoilProfile p = test::default_soil();
  EXPECT_EQ(read_soil(write_soil(p)), p);
  EXPECT_EQ(write_soil(read_soil(write_soil(p))), write_soil(p));
}

TEST(Dataset, RoundTrip) {
  Rng rng(11);
  SurrogateDataset d;
  d.n_features = 33;
  for (int r = 0; r < 20; ++r) {
    for (int c = 0; c < 33; ++c) d.features.push_back(rng.uniform(-50, 50));
    d.yields.push_back(rng.uniform(0, 6000));
  }
  const std::string text = write_dataset(d);
  EXPECT_EQ(text.substr(0, 8), "x00,x01,");
  EXPECT_EQ(read_dataset(text), d);
  EXPECT_EQ(write_dataset(read_dataset(text)), text);
}

TEST(Bounds, ShippedFileMatchesBuiltIn) {
  const auto parsed = parse_genetic_bounds(read_text_file(test::data_path("genetics_bounds.json")));
  EXPECT_EQ(parsed, default_genetic_bounds());
  EXPECT_EQ(parse_genetic_bounds(write_genetic_bounds(parsed)), parsed);
}

TEST(Format, NumbersRoundTripWithoutExponents) {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-8, 12));
    const std::string s = format_number(v);
    if (std::abs(v) >= 1e-9) EXPECT_EQ(s.find('e'), std::string::npos) << s;
    EXPECT_EQ(std::stod(s), v) << s;
  }
  EXPECT_EQ(format_number(3537.0), "3537");
  EXPECT_EQ(format_number(2737.0, 1), "2737.0");
  EXPECT_EQ(format_number(-91.21, 4), "-91.2100");
}

// Arbitrary bytes must end in a structured error or a valid value.
TEST(Fuzz, ParsersNeverCrash) {
  Rng rng(2024);
  const std::string seeds[] = {
      std::string(kHeader) + "09001   1.1  25.0  18.5  20.7\n",
      "year,lat,lon,fips,yield,state,county\n2013,40.106,-90.000,17017,3537,IL,Cass\n",
      read_text_file(test::data_path("fixtures/sample_calibration.json")),
      soil_doc(7, 30, 40, 30),
      "x00,x01,yield\n1,2,3\n",
  };
  for (int iter = 0; iter < 3000; ++iter) {
    std::string s = seeds[static_cast<std::size_t>(iter) % std::size(seeds)];
    const int edits = 1 + static_cast<int>(rng.below(6));
    for (int k = 0; k < edits; ++k) {
      if (s.empty()) break;
      const std::size_t pos = rng.below(s.size());
      switch (rng.below(3)) {
        case 0: s[pos] = static_cast<char>(rng.below(256)); break;
        case 1: s.erase(pos, 1 + rng.below(4)); break;
        default: s.insert(pos, 1, static_cast<char>(rng.below(256))); break;
      }
    }
    auto guard = [&](auto&& parse) {
      try {
        parse(s);
      } catch (const Error&) {
      }
    };
    guard([](const std::string& t) { parse_weather(t); });
    guard([](const std::string& t) { parse_yield_records(t); });
    guard([](const std::string& t) { read_calibration_db(t); });
    guard([](const std::string& t) { read_soil(t); });
    guard([](const std::string& t) { read_dataset(t); });
    guard([](const std::string& t) { parse_genetic_bounds(t); });
  }
}

TEST(Files, AtomicWriteReplaces) {
  test::ScratchDir dir("files");
  const std::string p = dir / "out.txt";
  write_text_file_atomic(p, "first");
  write_text_file_atomic(p, "second");
  EXPECT_EQ(read_text_file(p), "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++entries;
  EXPECT_EQ(entries, 1u);
}

TEST(Files, FieldWeatherStem) {
  EXPECT_EQ(field_weather_stem("Adams", 39.8428, -91.21), "Adams_398428_-912100");
}
