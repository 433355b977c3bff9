#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string command = std::string(GMA_BINARY) + " " + args + " 2>/dev/null";
  Outcome result;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.out.append(buf, n);
  const int status = pclose(pipe);
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("gma_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

// Fourth column is the sum of the first two mod 2: strength 2, not 3.
const char* kOa8 =
    "levels: 2,2,2,2\n"
    "0,0,0,0\n0,0,1,0\n0,1,0,1\n0,1,1,1\n1,0,0,1\n1,0,1,1\n1,1,0,0\n1,1,1,0\n";

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run("construct --levels 2,2 --runs 0").code, 1);
  EXPECT_EQ(run("construct --levels 2,1 --runs 4").code, 1);
  EXPECT_EQ(run("construct --levels 2,2 --runs 4 --mode fast").code, 1);
  EXPECT_EQ(run("construct --levels 2,2 --runs 4 --format xml").code, 1);
  EXPECT_EQ(run("construct --levels 2,2").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(CliTest, EvaluateRejectsOutOfRangeLevel) {
  const auto file = write("bad.csv", "levels: 2,3\n0,0\n1,3\n");
  EXPECT_NE(run("evaluate " + file).code, 0);
  EXPECT_NE(run("verify " + file + " --strength 1").code, 0);
  EXPECT_NE(run("evaluate " + path("missing.csv")).code, 0);
}

TEST_F(CliTest, VerifyReportsStrength) {
  const auto file = write("oa8.csv", kOa8);
  const auto three = run("verify " + file + " --strength 3");
  EXPECT_NE(three.code, 0);
  EXPECT_NE(three.out.find("projection onto factors"), std::string::npos);
  const auto two = run("verify " + file + " -t 2");
  EXPECT_EQ(two.code, 0);
  EXPECT_NE(two.out.find("strength 2"), std::string::npos);
}

TEST_F(CliTest, EvaluateReproducesConstructedPatternExactly) {
  const auto constructed =
      run("construct --levels 2,2,2,2,2 --runs 12 --restarts 20 --no-timing --design-out " +
          path("d.csv"));
  ASSERT_EQ(constructed.code, 0);
  const auto report = nlohmann::json::parse(constructed.out);
  const auto evaluated = run("evaluate " + path("d.csv") + " --format json");
  ASSERT_EQ(evaluated.code, 0);
  const auto check = nlohmann::json::parse(evaluated.out);
  ASSERT_EQ(report["wlp"].size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(report["wlp"][i].get<double>(), check["wlp"][i].get<double>());
  }
  EXPECT_EQ(report["strength"], check["strength"]);
  EXPECT_EQ(report["strength"], 2);
}

TEST_F(CliTest, IdenticalSeedsGiveByteIdenticalJson) {
  const std::string args = "construct --levels 2,3,3 --runs 9 --seed 7 --restarts 10 --no-timing";
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(nlohmann::json::parse(a.out)["elapsed_s"].is_null());
}

TEST_F(CliTest, ExactModeProvesSmallInstance) {
  const auto r = run("construct --levels 2,2,2 --runs 4 --mode exact --format text");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("proven:   yes"), std::string::npos);
  EXPECT_NE(r.out.find("(0.00, 0.00, 1.00)"), std::string::npos);
}

TEST_F(CliTest, CsvOutputIsADesignFile) {
  const auto r = run("construct --levels 2,2 --runs 4 --format csv -o " + path("full.csv"));
  ASSERT_EQ(r.code, 0);
  const auto verified = run("verify " + path("full.csv") + " --strength 2");
  EXPECT_EQ(verified.code, 0);
}

}  // namespace
