#include <sstream>

#include <gtest/gtest.h>

#include "gma/report.hpp"

namespace gma {
namespace {

DesignFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_design(in);
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const DesignParseError& e) {
    return e.what();
  }
  return {};
}

TEST(ParseDesignTest, ReadsHeaderAndRuns) {
  const auto file = parse("levels: 2,3\n0,0\n1, 2\n\n0,1\n");
  EXPECT_EQ(file.spec.levels(), (std::vector<int>{2, 3}));
  EXPECT_EQ(file.design.runs, (std::vector<std::vector<int>>{{0, 0}, {1, 2}, {0, 1}}));
}

TEST(ParseDesignTest, ReportsLineAndColumnOfBadLevel) {
  EXPECT_NE(parse_error("levels: 2,3\n0,0\n1,3\n").find("line 3, column 2"), std::string::npos);
  EXPECT_NE(parse_error("levels: 2,3\n0,0\n-1,0\n").find("line 3, column 1"), std::string::npos);
  EXPECT_NE(parse_error("levels: 2,3\n0,x\n").find("line 2, column 2"), std::string::npos);
}

TEST(ParseDesignTest, RejectsMalformedFiles) {
  EXPECT_NE(parse_error("0,1\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error("levels: 2,3\n0\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("levels: 2,3\n0,1,1\n").find("line 2"), std::string::npos);
  EXPECT_FALSE(parse_error("levels: 2,1\n0,0\n").empty());
  EXPECT_FALSE(parse_error("levels: 2,2\n").empty());
  EXPECT_FALSE(parse_error("").empty());
  EXPECT_THROW(read_design_file("/nonexistent/design.csv"), DesignParseError);
}

TEST(WriteDesignTest, RoundTrip) {
  const FactorSpec spec({2, 3, 3});
  const DesignMatrix design{{{0, 2, 1}, {1, 0, 0}, {1, 0, 0}}};
  std::ostringstream out;
  write_design(out, spec, design);
  const auto file = parse(out.str());
  EXPECT_EQ(file.spec.levels(), spec.levels());
  EXPECT_EQ(file.design.runs, design.runs);
}

TEST(DisplayValueTest, TwoDecimals) {
  EXPECT_EQ(display_value(10.0 / 9.0), "1.11");
  EXPECT_EQ(display_value(0.0), "0.00");
  EXPECT_EQ(display_value(-1e-17), "0.00");
  EXPECT_EQ(display_value(0.5), "0.50");
}

TEST(EvaluateDesignTest, HalfFraction) {
  const auto file = parse("levels: 2,2,2\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n");
  const auto report = evaluate_design(file);
  EXPECT_EQ(report.runs, 4);
  EXPECT_NEAR(report.wlp[2], 1.0, 1e-12);
  EXPECT_TRUE(report.paths_agree());
  EXPECT_TRUE(report.strengths_agree());
  EXPECT_EQ(report.strength_projection, 2);
  const auto j = to_json(report);
  EXPECT_EQ(j["strength"], 2);
  EXPECT_EQ(j["is_oa"], true);
  EXPECT_NE(to_text(report).find("strength"), std::string::npos);
}

TEST(ConstructReportTest, JsonKeysInOrder) {
  const FactorSpec spec({2, 2});
  ConstructReport report{spec, 2, SolverConfig{}, {}, {}, std::nullopt};
  report.result.y = CountingVector({1, 0, 0, 1});
  report.result.wlp.alpha = {0.0, 1.0};
  report.result.strength = 1;
  report.result.steps = {{1, report.result.y, 0.0, StepStatus::best_found},
                         {2, report.result.y, 4.0, StepStatus::best_found}};
  report.design = DesignMatrix{{{0, 0}, {1, 1}}};
  const auto j = to_json(report);
  std::vector<std::string> keys;
  for (const auto& [key, _] : j.items()) keys.push_back(key);
  EXPECT_EQ(keys, (std::vector<std::string>{"levels", "runs", "wlp", "wlp_display", "strength",
                                            "is_oa", "steps", "seed", "mode", "elapsed_s",
                                            "proven", "counting_vector", "design"}));
  EXPECT_TRUE(j["elapsed_s"].is_null());
  EXPECT_EQ(j["steps"][1]["k"], 2);
  EXPECT_EQ(j["steps"][1]["W_star"], 4.0);
  EXPECT_EQ(j["steps"][1]["status"], "best-found");
  EXPECT_EQ(j["mode"], "heuristic");
  EXPECT_EQ(j["wlp_display"][1], "1.00");
  report.elapsed_s = 0.25;
  EXPECT_EQ(to_json(report)["elapsed_s"], 0.25);
  EXPECT_NE(to_text(report).find("(0.00, 1.00)"), std::string::npos);
}

}  // namespace
}  // namespace gma
