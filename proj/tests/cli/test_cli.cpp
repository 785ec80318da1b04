#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "experiment.hpp"
#include "zograd/risk.hpp"

using namespace zograd;
using namespace zograd::cli;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

TEST(Config, FlagsOverrideFile) {
  const auto path = write_temp("cfg.json", "{\n  \"command\": \"bounds\",\n  \"a\": 2,\n  \"n_list\": [4, 8]\n}\n");
  const auto c = load_config(path, {{"a", "3"}}, std::nullopt);
  EXPECT_EQ(c.command, "bounds");
  EXPECT_EQ(c.a, 3.0);
  EXPECT_EQ(c.n_list, (std::vector<int>{4, 8}));
}

TEST(Config, UnknownKeyHasLine) {
  const auto path = write_temp("bad.json", "{\n  \"command\": \"bounds\",\n\n  \"alpha\": 2\n}\n");
  try {
    load_config(path, {}, std::nullopt);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("alpha"), std::string::npos);
  }
}

TEST(Config, Errors) {
  EXPECT_THROW(load_config("", {}, std::nullopt), ConfigError);
  EXPECT_THROW(load_config("", {{"command", "plot"}}, std::nullopt), ConfigError);
  EXPECT_THROW(load_config("", {{"command", "bounds"}, {"b", "-1"}}, std::nullopt), ConfigError);
  EXPECT_THROW(load_config("", {{"command", "bounds"}, {"n", "x"}}, std::nullopt), ConfigError);
  EXPECT_THROW(load_config("", {{"command", "bounds"}, {"n", "4"}, {"n_list", "4,8"}}, std::nullopt), ConfigError);
  EXPECT_THROW(load_config("", {{"command", "brute-force"}, {"n", "5"}}, std::nullopt), ConfigError);
  EXPECT_THROW(load_config("", {{"command", "bounds"}, {"format", "svg"}}, std::nullopt), ConfigError);
  EXPECT_THROW(load_config("", {{"command", "risk-curve"}, {"p", "2"}, {"n", "6"}}, std::nullopt), ConfigError);
  const auto syntax = write_temp("syntax.json", "{\n  \"command\": \"bounds\",,\n}\n");
  try {
    load_config(syntax, {}, std::nullopt);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Config, SeedDefaults) {
  EXPECT_EQ(load_config("", {{"command", "bounds"}}, 99).seed, 99u);
  EXPECT_EQ(load_config("", {{"command", "bounds"}, {"seed", "5"}}, 99).seed, 5u);
  EXPECT_EQ(load_config("", {{"command", "bounds"}}, std::nullopt).seed, 7u);
}

TEST(Bounds, CellsMatchLibrary) {
  const auto c = load_config("", {{"command", "bounds"}, {"n", "64"}}, std::nullopt);
  std::ostringstream out;
  ASSERT_EQ(run(c, out), 0);
  std::istringstream in(out.str());
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "n,p,q,a,b,linear_lower,linear_lower_same_sign,cfd_upper,general_lower");
  const auto cells = split(row);
  ASSERT_EQ(cells.size(), 9u);
  const BoundQuery q{64, 1, 1, 1, Norm::l2, BoundFlavor::linear_lower};
  EXPECT_EQ(std::stod(cells[5]), linear_minimax_lower(q));
  EXPECT_NEAR(std::stod(cells[5]), 0.035772, 5e-7);
  EXPECT_EQ(std::stod(cells[8]), general_minimax_lower(64, 1, 1, 1, Norm::l2));
  EXPECT_NEAR(std::stod(cells[8]), std::exp(-2.0 / 3.0) / 16.0 * std::cbrt(9.0) / 16.0, 1e-16);
}

TEST(Bounds, CfdCellEmptyWhenNotDivisible) {
  const auto c = load_config("", {{"command", "bounds"}, {"n", "6"}, {"p", "2"}}, std::nullopt);
  const auto t = bounds_table(c);
  EXPECT_TRUE(std::holds_alternative<std::monostate>(t.rows[0][7]));
}

TEST(Worstcase, PeakAtOne) {
  const auto c = load_config("", {{"command", "worstcase"}, {"eps", "1"}, {"a", "1"}, {"p", "1"}}, std::nullopt);
  const auto t = worstcase_table(c);
  double best = 0.0;
  double at = 0.0;
  for (const auto& row : t.rows) {
    const double f = std::abs(std::get<double>(row[1]));
    if (f > best) {
      best = f;
      at = std::get<double>(row[0]);
    }
  }
  EXPECT_NEAR(best, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(std::abs(at), 1.0);
}

TEST(Worstcase, LatticeAndSvg) {
  const auto c = load_config("", {{"command", "worstcase"}, {"p", "2"}, {"format", "svg"}}, std::nullopt);
  EXPECT_EQ(worstcase_table(c).rows.size(), 101u * 101u);
  std::ostringstream out;
  EXPECT_EQ(run(c, out), 0);
  EXPECT_EQ(out.str().rfind("<svg", 0), 0u);
  EXPECT_NE(out.str().find("<rect"), std::string::npos);
}

TEST(RiskCurve, DeterministicCsv) {
  const auto c = load_config("", {{"command", "risk-curve"}, {"n_list", "2,8"}, {"reps", "2000"}}, std::nullopt);
  std::ostringstream a;
  std::ostringstream b;
  run(c, a);
  run(c, b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "n,delta,mse,bias_sq,variance,std_error,bound");
}

TEST(RiskCurve, CustomDesign) {
  const auto path = write_temp("design.json", "{\"deltas\": [1, -1], \"weights\": [0.5, -0.5]}");
  const auto c = load_config("", {{"command", "risk-curve"}, {"estimator", "custom:" + path}, {"reps", "20000"}},
                             std::nullopt);
  const auto t = risk_curve_table(c);
  ASSERT_EQ(t.rows.size(), 1u);
  const double mse = std::get<double>(t.rows[0][2]);
  const double se = std::get<double>(t.rows[0][5]);
  EXPECT_LE(std::abs(mse - (1.0 / 36.0 + 0.5)), 3.0 * se);
}

TEST(Json, RowsAndNonFinite) {
  Table t{"bounds", {"x", "y", "z"}, {{1.5, std::string("inf"), Cell{}}, {INFINITY, 2LL, 0.25}}};
  std::ostringstream out;
  write_json(t, out);
  EXPECT_NE(out.str().find("\"inf\""), std::string::npos);
  EXPECT_NE(out.str().find("null"), std::string::npos);
  std::ostringstream csv;
  write_csv(t, csv);
  EXPECT_EQ(csv.str(), "x,y,z\n1.5,inf,\ninf,2,0.25\n");
}
