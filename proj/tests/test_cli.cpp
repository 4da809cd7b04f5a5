#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cachecast/cli.hpp"

using namespace cachecast;

namespace {

struct outcome {
  int code = 0;
  std::string out;
  std::string err;
};

outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  outcome o;
  o.code = run(std::move(args), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string scenario(const std::string& name) { return std::string(CACHECAST_SCENARIO_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& text = "") {
  const auto path = (std::filesystem::temp_directory_path() / ("cachecast_test_" + name)).string();
  if (!text.empty()) std::ofstream(path) << text;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, UpperTableListsEveryOrdering) {
  auto o = invoke({"rates", "upper", "--table", scenario("example2.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* line : {"pi (1,2,3) 1.63636", "pi (1,3,2) 1.73077", "pi (2,1,3) 1.62", "pi (2,3,1) 1.60714",
                           "pi (3,1,2) 1.76087", "pi (3,2,1) 1.65789", "value 1.60714", "argmin (2,3,1)",
                           "omega_star 0 1.25 1"})
    EXPECT_NE(o.out.find(line), std::string::npos) << line << "\n" << o.out;
}

TEST(Cli, AchievableJsonParses) {
  auto o = invoke({"rates", "achievable", "--json", scenario("example2.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  auto j = json::parse(o.out);
  EXPECT_NEAR(j.at("rate").get<double>(), 1.5, 1e-9);
  EXPECT_TRUE(j.at("given_check").at("feasible").get<bool>());
}

TEST(Cli, DumpMatricesWritesCsv) {
  const auto path = temp_file("matrices.csv");
  auto o = invoke({"rates", "achievable", "--dump-matrices", path, scenario("example2.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto text = read_file(path);
  EXPECT_NE(text.find("(1,{2})"), std::string::npos);
  EXPECT_NE(text.find("-0.9"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, DegradedReportsRate) {
  auto o = invoke({"rates", "degraded", scenario("example1.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("rate 1.32632"), std::string::npos) << o.out;
}

TEST(Cli, DegradedRejectsCrossingRows) {
  auto o = invoke({"rates", "degraded", scenario("example2.json")});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("NotDegraded"), std::string::npos) << o.err;
}

TEST(Cli, TwoUserPrintsSplit) {
  auto o = invoke({"rates", "two-user", scenario("two_user.json")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.out.rfind("rate ", 0), 0u);
  EXPECT_NE(o.out.find("level 4"), std::string::npos);
}

TEST(Cli, SweepOfSingleUser) {
  auto o = invoke({"sweep", scenario("single_user.json"), "--mu", "0:1/2:1/4"});
  ASSERT_EQ(o.code, 0) << o.err;
  std::istringstream lines(o.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "mu,mu_exact,f_lp,f_star,f_bar");
  int rows = 0;
  while (std::getline(lines, line)) {
    std::vector<std::string> cells;
    std::stringstream cs(line);
    for (std::string c; std::getline(cs, c, ',');) cells.push_back(c);
    cells.resize(5);
    const double mu = std::stod(cells[0]);
    // The LP and degraded columns are blank unless K mu is an integer.
    EXPECT_EQ(cells[2].empty(), mu != 0.0) << line;
    for (int i : {2, 3, 4}) {
      if (cells[i].empty()) continue;
      EXPECT_NEAR(std::stod(cells[i]), 1.5 / (1 - mu), 1e-9) << line;
    }
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Cli, SimulateJsonAndTrace) {
  const auto trace = temp_file("trace.csv");
  auto o = invoke({"simulate", scenario("example2.json"), "--n", "2000", "--seed", "5", "--trace", trace, "--json"});
  ASSERT_EQ(o.code, 0) << o.err;
  auto j = json::parse(o.out);
  EXPECT_EQ(j.at("n").get<int>(), 2000);
  EXPECT_EQ(j.at("messages").size(), 6u);
  const auto text = read_file(trace);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  std::filesystem::remove(trace);
}

TEST(Cli, NonMonotoneConfigNamesTheLine) {
  auto o = invoke({"rates", "degraded", std::string(CACHECAST_TEST_DATA) + "/bad_monotone.json"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("bad_monotone.json:4:"), std::string::npos) << o.err;
  EXPECT_NE(o.err.find("NotMonotone"), std::string::npos) << o.err;
}

TEST(Cli, MissingKeyIsInvalid) {
  const auto path = temp_file("missing.json", "{\"K\": 1, \"B\": 1, \"mu\": \"0\"}");
  auto o = invoke({"rates", "upper", path});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("ccdf"), std::string::npos);
  std::filesystem::remove(path);
}

TEST(Cli, NonIntegerLoadIsInvalid) {
  const auto path = temp_file("half.json", "{\"K\": 3, \"B\": 1, \"ccdf\": [[0.5],[0.6],[0.7]], \"mu\": \"1/2\"}");
  auto o = invoke({"rates", "achievable", path});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("NonIntegerT"), std::string::npos) << o.err;
  std::filesystem::remove(path);
}

TEST(Cli, ExplicitPlacementOnlyForUpperBound) {
  const auto path = temp_file("placement.json",
                              "{\"K\": 2, \"B\": 1, \"ccdf\": [[0.5],[0.6]], \"mu\": \"1/2\",\n"
                              " \"caching\": {\"intervals\": [[[\"0\", \"1/2\"]], [[\"1/4\", \"3/4\"]]]}}");
  auto upper = invoke({"rates", "upper", path});
  EXPECT_EQ(upper.code, 0) << upper.err;
  auto achievable = invoke({"rates", "achievable", path});
  EXPECT_EQ(achievable.code, 2);
  std::filesystem::remove(path);
}

TEST(Cli, UnknownCommandIsInvalid) {
  EXPECT_EQ(invoke({"rates", "nonsense"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}
