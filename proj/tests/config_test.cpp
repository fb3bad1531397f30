#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "dlsgd/config.hpp"
#include "dlsgd/error.hpp"

namespace dlsgd {
namespace {

const std::filesystem::path kData = DLSGD_TEST_DATA_DIR;

const std::string kBase =
    "problem.kind = quadratic\n"
    "problem.d = 20\n"
    "problem.c1 = 15\n"
    "problem.c2 = 1/12\n"
    "topology.kind = er\n"
    "topology.n = 20\n"
    "topology.p = 0.3\n"
    "topology.seed = 7\n"
    "schedule.strategy = varying:40\n"
    "run.T = 2000\n"
    "run.beta = 1\n";

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  text.replace(text.find(from), from.size(), to);
  return text;
}

TEST(Config, MinimalFixtureLoads) {
  const auto cfg = load_config(kData / "quadratic_min.cfg");
  EXPECT_EQ(cfg.problem.kind, ProblemKind::kQuadratic);
  EXPECT_EQ(cfg.topology.kind, TopologyKind::kPath);
  EXPECT_EQ(cfg.topology.n, 4u);
  EXPECT_EQ(cfg.strategy, "every_step");
  EXPECT_EQ(cfg.horizon, 10u);
  EXPECT_EQ(cfg.repetitions, 1u);
  EXPECT_DOUBLE_EQ(cfg.problem.c2, 1.0 / 12.0);
  ASSERT_TRUE(cfg.beta.has_value());
  EXPECT_EQ(*cfg.beta, 1.0);
}

TEST(Config, Defaults) {
  const auto cfg = parse(kBase);
  EXPECT_EQ(cfg.repetitions, 100u);
  EXPECT_EQ(cfg.base_seed, 1u);
  EXPECT_EQ(cfg.record_every, 0u);
  EXPECT_EQ(cfg.output, "out");
  EXPECT_EQ(cfg.topology.weights, WeightRule::kMetropolisHastings);
  EXPECT_EQ(parse(kBase + "topology.weights = max_degree\n").topology.weights, WeightRule::kMaxDegree);
}

TEST(Config, LogisticFixtureResolvesRelativeDataset) {
  const auto cfg = load_config(kData / "logistic_fixture.cfg");
  EXPECT_EQ(cfg.problem.kind, ProblemKind::kLogistic);
  EXPECT_EQ(cfg.problem.dataset, kData / "fixture5.svm");
  ASSERT_TRUE(cfg.problem.dimension.has_value());
  EXPECT_EQ(*cfg.problem.dimension, 10u);
}

TEST(Config, VaryingBeyondLimitIsRejected) {
  EXPECT_THROW(parse(replace(kBase, "varying:40", "varying:100")), ConfigError);
  EXPECT_NO_THROW(parse(replace(kBase, "varying:40", "varying:63")));
}

TEST(Config, ErDelta) {
  auto text = replace(kBase, "topology.p = 0.3", "topology.delta = 0.1");
  text = replace(text, "topology.n = 20", "topology.n = 64");
  const auto cfg = parse(text);
  EXPECT_NEAR(cfg.topology.probability(), 1.1 * std::log(64.0) / 64.0, 1e-15);
  EXPECT_NEAR(cfg.topology.probability(), 0.0715, 5e-5);
  EXPECT_THROW(parse(replace(kBase, "topology.p = 0.3", "topology.p = 0.3\ntopology.delta = 2")), ConfigError);
  EXPECT_THROW(parse(replace(kBase, "topology.p = 0.3\n", "")), ConfigError);
}

TEST(Config, BetaMin) {
  const auto cfg = parse(replace(kBase, "run.beta = 1", "run.beta = min"));
  EXPECT_FALSE(cfg.beta.has_value());
}

TEST(Config, FailsClosed) {
  EXPECT_THROW(parse(kBase + "run.bogus = 1\n"), ConfigError);
  EXPECT_THROW(parse(kBase + "run.T = 5\n"), ConfigError);
  EXPECT_THROW(parse(replace(kBase, "run.T = 2000\n", "")), ConfigError);
  EXPECT_THROW(parse(kBase + "problem.lambda = 0.1\n"), ConfigError);
  EXPECT_THROW(parse(replace(kBase, "topology.kind = er", "topology.kind = path")), ConfigError);
  EXPECT_THROW(parse(replace(kBase, "run.T = 2000", "run.T = two")), ConfigError);
  EXPECT_THROW(parse(replace(kBase, "run.T = 2000", "run.T = -4")), ConfigError);
  EXPECT_THROW(parse(replace(kBase, "problem.c2 = 1/12", "problem.c2 = 1/0")), ConfigError);
  EXPECT_THROW(parse(replace(kBase, "problem.kind = quadratic", "problem.kind = cubic")), ConfigError);
  EXPECT_THROW(parse(kBase + "no equals sign\n"), ConfigError);
  EXPECT_THROW(parse(replace(kBase, "varying:40", "sometimes")), ConfigError);
  EXPECT_THROW(parse(replace(kBase, "topology.n = 20", "topology.n = 0")), ConfigError);
  EXPECT_THROW(parse(kBase + "run.repetitions = 0\n"), ConfigError);
  EXPECT_THROW(parse(kBase + "topology.weights = uniform\n"), ConfigError);
}

TEST(Config, ErrorNamesLine) {
  try {
    parse(kBase + "run.bogus = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 12"), std::string::npos) << e.what();
  }
}

TEST(Config, MissingDatasetIsRejected) {
  std::istringstream in(
      "problem.kind = logistic\nproblem.dataset = nope.svm\nproblem.lambda = 0.05\n"
      "topology.kind = complete\ntopology.n = 2\nschedule.strategy = every_step\nrun.T = 5\nrun.beta = 1\n");
  EXPECT_THROW(parse_config(in, kData), ConfigError);
}

TEST(Config, CommentsAndWhitespace) {
  const auto cfg = parse("# header\n" + replace(kBase, "run.T = 2000", "  run.T=2000   # trailing") + "\n\n");
  EXPECT_EQ(cfg.horizon, 2000u);
}

TEST(Config, HashTracksSemanticFields) {
  const auto base = parse(kBase);
  const auto h = base.hash();
  EXPECT_EQ(parse(kBase).hash(), h);
  EXPECT_EQ(parse(kBase + "run.output = elsewhere\n").hash(), h);
  for (const auto& [from, to] : std::vector<std::pair<std::string, std::string>>{
           {"problem.d = 20", "problem.d = 21"},
           {"problem.c1 = 15", "problem.c1 = 14"},
           {"problem.c2 = 1/12", "problem.c2 = 1/11"},
           {"topology.n = 20", "topology.n = 21"},
           {"topology.p = 0.3", "topology.p = 0.31"},
           {"topology.seed = 7", "topology.seed = 8"},
           {"varying:40", "varying:41"},
           {"run.T = 2000", "run.T = 2001"},
           {"run.beta = 1", "run.beta = 2"},
           {"run.beta = 1", "run.beta = min"},
       }) {
    EXPECT_NE(parse(replace(kBase, from, to)).hash(), h) << to;
  }
  EXPECT_NE(parse(kBase + "run.repetitions = 7\n").hash(), h);
  EXPECT_NE(parse(kBase + "run.seed = 7\n").hash(), h);
  EXPECT_NE(parse(kBase + "run.record_every = 7\n").hash(), h);
  EXPECT_NE(parse(kBase + "topology.weights = max_degree\n").hash(), h);
}

TEST(Config, ValidateAfterEdits) {
  auto cfg = parse(kBase);
  cfg.horizon = 100;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.strategy = "varying:10";
  EXPECT_NO_THROW(cfg.validate());
}

}  // namespace
}  // namespace dlsgd
