#include "grape/config.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace grape {
namespace {

RunConfig parse(const std::string& text) {
  RunConfig c;
  std::istringstream is(text);
  load_config(is, c);
  return c;
}

std::string offending_key(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<none>";
}

TEST(RunConfig, DefaultsFollowTheExperimentalConstants) {
  const RunConfig c;
  EXPECT_EQ(c.M, 256);
  EXPECT_EQ(c.J, 21.0);
  EXPECT_EQ(c.rise_ns, 4.0);
  EXPECT_EQ(c.delta_max, 1000.0);
  EXPECT_EQ(c.omega_max, 50.0);
  EXPECT_EQ(c.stages.size(), 3u);
  EXPECT_EQ(c.stages[0].population, 50);
  EXPECT_EQ(c.stages[2].iterations, 1000);
  EXPECT_EQ(c.effective_threshold(), 1.0 - 1e-5);
}

TEST(RunConfig, ThresholdAndBoundsDependOnModel) {
  const RunConfig c = parse("model = real3\n");
  EXPECT_EQ(c.effective_threshold(), 1.0 - 1e-3);
  EXPECT_TRUE(c.effective_bounds());
  EXPECT_TRUE(c.effective_envelope());
  EXPECT_FALSE(parse("model = ideal3").effective_bounds());
  EXPECT_FALSE(parse("model = real2\nbounds = off").effective_envelope());
}

TEST(RunConfig, ParsesCommentsAndWhitespace) {
  const RunConfig c = parse(
      "# sweep setup\n"
      "model=ideal3   # idealized\n"
      "  gate = swap13\n"
      "\n"
      "T_min = 1.0\nT_max=1.3\nresolution = 0.05\n"
      "stages = 20x50, 4x200\n"
      "seed = 12345678901234\n");
  EXPECT_EQ(c.model, ModelKind::Ideal3);
  EXPECT_EQ(c.gate, "swap13");
  EXPECT_EQ(c.T_max, 1.3);
  ASSERT_EQ(c.stages.size(), 2u);
  EXPECT_EQ(c.stages[1].iterations, 200);
  EXPECT_EQ(c.seed, 12345678901234ull);
}

TEST(RunConfig, LaterValuesWin) {
  RunConfig c = parse("M = 64\nM = 128\n");
  EXPECT_EQ(c.M, 128);
  c.set("M", "32");
  EXPECT_EQ(c.M, 32);
}

TEST(RunConfig, NanosecondUnits) {
  const RunConfig c = parse("units = ns\nT = 47.619047619047619\n");
  EXPECT_NEAR(c.to_tau(*c.T), 1.0, 1e-12);
  EXPECT_EQ(parse("T = 1.0").to_tau(1.0), 1.0);
}

TEST(RunConfig, ErrorsNameTheOffendingKey) {
  EXPECT_EQ(offending_key("M = twelve"), "M");
  EXPECT_EQ(offending_key("model = ideal4"), "model");
  EXPECT_EQ(offending_key("gate = toffoli"), "gate");
  EXPECT_EQ(offending_key("colour = blue"), "colour");
  EXPECT_EQ(offending_key("threshold = 1.5"), "threshold");
  EXPECT_EQ(offending_key("stages = 10x100,20x50"), "stages");
  EXPECT_EQ(offending_key("stages = 10"), "stages");
  EXPECT_EQ(offending_key("bounds = maybe"), "bounds");
  EXPECT_EQ(offending_key("J = -21"), "J");
  EXPECT_EQ(offending_key("resolution = 0"), "resolution");
  EXPECT_EQ(offending_key("seed ="), "seed");
  EXPECT_EQ(offending_key("just words"), "just words");
}

TEST(RunConfig, BuildsOptionsAndProtocol) {
  RunConfig c = parse("model = real2\nmode = first_order\nattempts = 3\ninit_scale = 0.5\n");
  const auto o = c.optimize_options();
  EXPECT_EQ(o.mode, GradientMode::FirstOrder);
  EXPECT_TRUE(o.bounds_on);
  EXPECT_EQ(o.threshold, kRealisticThreshold);
  const auto p = c.protocol(4);
  EXPECT_EQ(p.attempts, 3);
  EXPECT_EQ(p.jobs, 4);
  EXPECT_EQ(p.init_scale, 0.5);
}

TEST(RunConfig, EveryDocumentedKeyIsAccepted) {
  const std::map<std::string, std::string> sample = {
      {"model", "ideal2"},   {"gate", "cnot12"},     {"J", "20"},         {"delta_max", "900"},
      {"omega_max", "40"},   {"units", "1/J"},       {"T", "0.5"},        {"T_min", "0.4"},
      {"T_max", "0.6"},      {"resolution", "0.05"}, {"M", "64"},         {"threshold", "0.999"},
      {"bounds", "on"},      {"envelope", "off"},    {"rise_ns", "2"},    {"stages", "5x10"},
      {"seed", "3"},         {"init_scale", "0.1"},  {"attempts", "2"},   {"mode", "exact"},
      {"out", "run"},        {"samples", "11"},      {"initial_state", "010"},
      {"source", "sequential"}, {"controls", "c.csv"}, {"sequence_model", "ideal"}};
  for (const auto& key : config_keys()) {
    RunConfig c;
    ASSERT_TRUE(sample.count(key)) << key;
    EXPECT_NO_THROW(c.set(key, sample.at(key))) << key;
  }
}

}  // namespace
}  // namespace grape
