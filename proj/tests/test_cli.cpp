#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "bsderk/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "bsderk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = bsderk::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Splits into numeric and non-numeric runs so that floating output can be
// compared with a relative tolerance.
std::vector<std::string> tokens(const std::string& s) {
  static const std::regex num(R"([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)");
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), num); it != std::sregex_iterator(); ++it) {
    auto at = static_cast<std::size_t>(it->position());
    if (at > pos) out.push_back(s.substr(pos, at - pos));
    out.push_back("#" + it->str());
    pos = at + static_cast<std::size_t>(it->length());
  }
  if (pos < s.size()) out.push_back(s.substr(pos));
  return out;
}

::testing::AssertionResult matches(const std::string& got, const std::string& want) {
  auto a = tokens(got), b = tokens(want);
  if (a.size() != b.size())
    return ::testing::AssertionFailure() << "token count " << a.size() << " vs " << b.size();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == b[k]) continue;
    if (a[k][0] == '#' && b[k][0] == '#') {
      double x = std::stod(a[k].substr(1)), y = std::stod(b[k].substr(1));
      if (std::abs(x - y) <= 1e-9 * std::max(std::abs(x), std::abs(y)) + 1e-12) continue;
    }
    return ::testing::AssertionFailure() << "token " << k << ": got \"" << a[k] << "\" want \""
                                         << b[k] << "\"";
  }
  return ::testing::AssertionSuccess();
}

void golden(const std::string& name, const std::vector<std::string>& args, int want_code) {
  Run r = run(args);
  EXPECT_EQ(r.code, want_code) << r.err;
  fs::path file = fs::path(GOLDEN_DIR) / name;
  if (std::getenv("BSDERK_UPDATE_GOLDEN")) {
    std::ofstream(file, std::ios::binary) << r.out;
    return;
  }
  ASSERT_TRUE(fs::exists(file)) << file;
  EXPECT_TRUE(matches(r.out, slurp(file))) << name;
}

fs::path temp_file(const std::string& name, const std::string& content) {
  fs::path p = fs::temp_directory_path() / ("bsderk_test_" + name);
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

}  // namespace

TEST(CliGolden, Trees) {
  golden("trees_order5.md", {"trees", "--order", "5"}, 0);
  golden("trees_minus4.csv", {"--emit", "csv", "trees", "--order", "4", "--minus"}, 0);
  golden("trees_order3.json", {"trees", "--order", "3", "--emit", "json"}, 0);
}

TEST(CliGolden, Conditions) {
  golden("conditions_order4_render.md", {"conditions", "--order", "4", "--render"}, 0);
  golden("conditions_m3_order3.csv",
         {"conditions", "--order", "3", "--stages", "3", "--render", "--emit", "csv"}, 0);
}

TEST(CliGolden, Check) {
  golden("check_euler_order2.md", {"check", "--tableau", "euler", "--order", "2"}, 2);
  golden("check_rk4_5_order4.json", {"check", "--tableau", "rk4_5", "--order", "4", "--emit", "json"}, 0);
}

TEST(CliGolden, Search) {
  golden("search_m2_order2.json", {"search", "--stages", "2", "--order", "2", "--emit", "json"}, 0);
  golden("search_m4_order4.md", {"search", "--stages", "4", "--order", "4"}, 2);
}

TEST(CliGolden, Solve) {
  golden("solve_example2_rk3_N10.csv",
         {"solve", "--example", "2", "--scheme", "rk3:2/3,1/3", "--N", "10", "--emit", "csv"}, 0);
}

TEST(CliGolden, Convergence) {
  golden("convergence_example1_euler.md", {"convergence", "--example", "1", "--scheme", "euler"}, 0);
  golden("convergence_example2_rk2.csv",
         {"convergence", "--example", "2", "--scheme", "rk2:1/2;rk2:2/3", "--N", "10,20,40",
          "--emit", "csv"},
         0);
}

TEST(Cli, OutputIsByteDeterministic) {
  auto a = run({"convergence", "--example", "2", "--scheme", "rk3", "--N", "8,16", "--emit", "json"});
  auto b = run({"convergence", "--example", "2", "--scheme", "rk3", "--N", "8,16", "--emit", "json"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto s1 = run({"search", "--stages", "3", "--order", "3", "--seed", "5", "--emit", "json"});
  auto s2 = run({"search", "--stages", "3", "--order", "3", "--seed", "5", "--emit", "json", "--threads", "2"});
  EXPECT_EQ(s1.out, s2.out);
}

TEST(Cli, TreeCountsPerOrder) {
  auto r = run({"trees", "--order", "4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "T_4: 21 trees");
  r = run({"trees", "--order", "5", "--minus", "--emit", "json"});
  EXPECT_EQ(nlohmann::json::parse(r.out)["count"], 16);
}

TEST(Cli, CheckNamesTheFailingCondition) {
  auto r = run({"check", "--tableau", "euler", "--order", "2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("first failure: (5)"), std::string::npos);
}

TEST(Cli, CheckReadsTableauFiles) {
  auto good = temp_file("rk2.json", bsderk::to_json(bsderk::rk2(0.5)).dump());
  EXPECT_EQ(run({"check", "--tableau", good.string(), "--order", "2"}).code, 0);
  EXPECT_EQ(run({"check", "--tableau", good.string(), "--order", "3"}).code, 2);
  auto implicit = temp_file("implicit.json", R"({"m":1,"a":[[0.5]],"b":[1],"c":[1,0]})");
  auto r = run({"check", "--tableau", implicit.string(), "--order", "1"});
  EXPECT_EQ(r.code, 65);
  EXPECT_NE(r.err.find("condition (2)"), std::string::npos);
  auto garbage = temp_file("garbage.json", "{not json");
  EXPECT_EQ(run({"check", "--tableau", garbage.string(), "--order", "1"}).code, 65);
  EXPECT_EQ(run({"check", "--tableau", "/no/such/file.json", "--order", "1"}).code, 65);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 64);
  EXPECT_EQ(run({"trees"}).code, 64);
  EXPECT_EQ(run({"trees", "--order", "9"}).code, 64);
  EXPECT_EQ(run({"trees", "--order", "x"}).code, 64);
  EXPECT_EQ(run({"trees", "--order", "2", "--bogus"}).code, 64);
  EXPECT_EQ(run({"--emit", "xml", "trees", "--order", "2"}).code, 64);
  EXPECT_EQ(run({"solve", "--example", "3", "--scheme", "euler", "--N", "4"}).code, 64);
  EXPECT_EQ(run({"solve", "--example", "1", "--scheme", "rk9", "--N", "4"}).code, 64);
  EXPECT_EQ(run({"solve", "--example", "1", "--scheme", "rk2:1.5", "--N", "4"}).code, 64);
  EXPECT_EQ(run({"solve", "--example", "1", "--scheme", "euler"}).code, 64);
  EXPECT_EQ(run({"search", "--order", "2"}).code, 64);
  auto r = run({"check", "--order", "2"});
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("--tableau"), std::string::npos);
}

TEST(Cli, HelpExitsCleanly) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("convergence"), std::string::npos);
}

TEST(Cli, ConfigFileWithFlagOverrides) {
  auto cfg = temp_file("cfg.json", R"({"command": "trees", "order": 3, "emit": "csv"})");
  auto r = run({"--config", cfg.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 9);
  r = run({"--config", cfg.string(), "trees", "--order", "2"});
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);

  auto conv = temp_file("conv.json",
                        R"({"command": "convergence", "example": 2, "scheme": ["euler"], "N": [8, 16]})");
  r = run({"--config", conv.string(), "--emit", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["reports"][0]["rows"].size(), 2u);
  r = run({"--config", conv.string(), "--emit", "json", "convergence", "--N", "8,16,32"});
  EXPECT_EQ(nlohmann::json::parse(r.out)["reports"][0]["rows"].size(), 3u);
}

TEST(Cli, ConfigRejectsUnknownKeysAndBadTypes) {
  auto unknown = temp_file("unknown.json", R"({"command": "trees", "order": 3, "colour": "red"})");
  auto r = run({"--config", unknown.string()});
  EXPECT_EQ(r.code, 64);
  EXPECT_NE(r.err.find("colour"), std::string::npos);
  auto typed = temp_file("typed.json", R"({"command": "trees", "order": "three"})");
  EXPECT_EQ(run({"--config", typed.string()}).code, 64);
  auto broken = temp_file("broken.json", "[1, 2");
  EXPECT_EQ(run({"--config", broken.string()}).code, 65);
}

TEST(Cli, WritesReportToFile) {
  fs::path out = fs::temp_directory_path() / "bsderk_test_out.md";
  fs::remove(out);
  auto r = run({"-o", out.string(), "trees", "--order", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(out).substr(0, 13), "T_2: 3 trees\n");
}

TEST(Cli, SolveReportsWindowAndExtents) {
  auto r = run({"solve", "--example", "2", "--scheme", "euler", "--N", "4", "--emit", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["level_extents"].size(), 5u);
  for (double x : j["x"]) {
    EXPECT_GE(x, -1.0);
    EXPECT_LE(x, 1.0);
  }
  EXPECT_EQ(j["x"].size(), j["y"].size());
  EXPECT_FALSE(j.contains("runtime_s"));
  r = run({"solve", "--example", "2", "--scheme", "euler", "--N", "4", "--emit", "json", "--timing"});
  EXPECT_TRUE(nlohmann::json::parse(r.out).contains("runtime_s"));
}
