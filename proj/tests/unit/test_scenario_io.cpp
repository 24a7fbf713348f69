#include <fstream>

#include <gtest/gtest.h>

#include "dfrc/problem.hpp"
#include "dfrc/scenario_io.hpp"

using namespace dfrc;

namespace {

const std::string kPaperScenario = std::string(DFRC_SOURCE_DIR) + "/scenarios/paper_sec4.json";

Json minimal() {
  return Json::parse(R"({"array": {"num_antennas": 6}, "num_selected": 4, "users": {"angles_deg": [-30, 30]}})");
}

}  // namespace

TEST(LoadScenario, PaperFile) {
  const Scenario s = load_scenario(kPaperScenario);
  EXPECT_EQ(s.geometry.num_antennas, 10);
  EXPECT_EQ(s.geometry.element_spacing, 0.5);
  EXPECT_EQ(s.num_users(), 2);
  EXPECT_EQ(s.num_selected, 8);
  EXPECT_EQ(s.passband_threshold, 10.0);
  EXPECT_EQ(s.stopband_threshold, 0.5);
  EXPECT_DOUBLE_EQ(s.sinr_target, 10.0);
  EXPECT_EQ(s.noise_variance, 1.0);
  EXPECT_DOUBLE_EQ(s.antenna_power, 10.0);
  EXPECT_EQ(s.admm.eta, 0.1);
  EXPECT_EQ(s.admm.rho, 50.0);
  EXPECT_EQ(s.admm.max_iterations, 100);
  EXPECT_FALSE(s.admm.primal_tol);
  EXPECT_EQ(assemble(s).num_constraints(), 38);
  EXPECT_EQ(s.k_values, (std::vector<Index>{4, 6, 8, 10}));
}

TEST(LoadScenario, MissingFileIsConfigError) {
  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST(ParseScenario, DefaultsFillMissingFields) {
  const Scenario s = parse_scenario(minimal());
  EXPECT_EQ(s.geometry.num_antennas, 6);
  EXPECT_EQ(s.user_angles, (std::vector<double>{-30.0, 30.0}));
  EXPECT_EQ(s.admm, AdmmConfig{});
}

TEST(ParseScenario, UnitsAreConvertedAtTheBoundary) {
  Json a = minimal();
  Json b = minimal();
  a["users"]["sinr_target"] = "10dB";
  b["users"]["sinr_target"] = 10.0;
  a["antenna_power"] = "40dBm";
  b["antenna_power"] = "10W";
  EXPECT_EQ(parse_scenario(a), parse_scenario(b));
  a["antenna_power"] = "10dBW";
  EXPECT_EQ(parse_scenario(a), parse_scenario(b));
  b["antenna_power"] = 10.0;
  EXPECT_EQ(parse_scenario(a), parse_scenario(b));
  a["thresholds"] = {{"passband", "10dB"}};
  EXPECT_THROW(parse_scenario(a), ConfigError);
}

TEST(ParseScenario, ErrorsNameTheField) {
  auto expect_error = [](const Json& j, const std::string& field) {
    try {
      parse_scenario(j);
      FAIL() << "accepted " << j.dump();
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  Json j = minimal();
  j["num_selected"] = 0;
  expect_error(j, "num_selected");
  j = minimal();
  j["users"]["colour"] = 1;
  expect_error(j, "colour");
  j = minimal();
  j["bogus"] = true;
  expect_error(j, "bogus");
  j = minimal();
  j["users"]["sinr_target"] = "10 furlongs";
  expect_error(j, "users.sinr_target");
  j = minimal();
  j["admm"] = {{"rho", -1}};
  expect_error(j, "rho");
  j = minimal();
  j["array"]["num_antennas"] = 2.5;
  expect_error(j, "array.num_antennas");
  j = minimal();
  j["grids"] = {{"stopband_deg", {{-2, 2}}}};
  expect_error(j, "overlap");
  EXPECT_THROW(parse_scenario_text("{not json"), ConfigError);
}

TEST(ParseScenario, RoundTrip) {
  const Scenario s = load_scenario(kPaperScenario);
  EXPECT_EQ(parse_scenario_text(write_scenario(s)), s);
  Scenario t;
  t.channel_model = ChannelModel::kRayleigh;
  t.channel_seed = 123456789012345ull;
  t.admm.primal_tol = 1e-5;
  t.admm.dual_tol = 1e-5;
  t.refit.max_iterations = 7;
  t.m_values = {1, 3};
  EXPECT_EQ(parse_scenario_text(write_scenario(t)), t);
}

TEST(ScenarioHash, StableAndSensitive) {
  const Scenario s = load_scenario(kPaperScenario);
  const std::string h = scenario_hash(s);
  EXPECT_EQ(h.size(), 16u);
  EXPECT_EQ(h, scenario_hash(parse_scenario_text(write_scenario(s))));
  Scenario t = s;
  t.stopband_threshold = 0.4;
  EXPECT_NE(h, scenario_hash(t));
}

// Every key the writer emits must be declared in the shipped schema, and vice versa.
TEST(Schema, DeclaresExactlyTheWrittenKeys) {
  std::ifstream in(std::string(DFRC_SOURCE_DIR) + "/schema/scenario.schema.json");
  ASSERT_TRUE(in);
  const Json schema = Json::parse(in);
  Scenario s;
  s.admm.primal_tol = 1e-5;
  const Json written = to_json(s);
  for (const auto& [key, value] : written.items()) {
    ASSERT_TRUE(schema["properties"].contains(key)) << key;
    if (value.is_object()) {
      const auto& declared = schema["properties"][key]["properties"];
      for (const auto& [inner, _] : value.items()) EXPECT_TRUE(declared.contains(inner)) << key << "." << inner;
      for (const auto& [inner, _] : declared.items()) EXPECT_TRUE(value.contains(inner)) << key << "." << inner;
    }
  }
  for (const auto& [key, _] : schema["properties"].items()) {
    if (key != "description") EXPECT_TRUE(written.contains(key)) << key;
  }
}
