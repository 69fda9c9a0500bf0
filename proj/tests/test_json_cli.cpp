#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ncdist/cli.hpp"
#include "ncdist/errors.hpp"
#include "ncdist/json_io.hpp"
#include "ncdist/moyal_calculus.hpp"
#include "test_support.hpp"

using namespace ncdist;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("ncdist_test_" + name);
}

}  // namespace

TEST(Json, MoyalElementRoundtrip) {
  const auto a = ncdist::testing::random_element(0.8, 5);
  const auto back = moyal_element_from_json(Json::parse(to_json(a).dump()));
  EXPECT_EQ(back.theta(), 0.8);
  EXPECT_EQ(max_abs_diff(back, a), 0.0);
  EXPECT_THROW(moyal_element_from_json(Json::parse(R"({"re": [[1]]})")), ParameterError);
}

TEST(Json, DerivativeRoundtrip) {
  const auto d = delbar(ncdist::testing::random_element(1.0, 4));
  const auto back = derivative_from_json(Json::parse(to_json(d).dump()));
  EXPECT_EQ(back.kind(), Derivation::Delbar);
  EXPECT_EQ((back.coeffs() - d.coeffs()).cwiseAbs().maxCoeff(), 0.0);
  Json bad = to_json(d);
  bad["kind"] = "sideways";
  EXPECT_THROW(derivative_from_json(bad), ParameterError);
}

TEST(Json, TorusRoundtrip) {
  TorusElement a(0.37);
  a.set({1, -2}, Complex(0.5, -1.25));
  a.set({0, 0}, 3.0);
  const Json j = to_json(a);
  EXPECT_EQ(j.at("terms").size(), 2u);
  EXPECT_EQ(max_abs_diff(torus_element_from_json(Json::parse(j.dump())), a), 0.0);
}

TEST(Json, DistanceReportKeysAndNulls) {
  DistanceOptions opts;
  opts.order = 4;
  opts.run_optimizer = false;
  const Json j = to_json(moyal_distance(basis_state(0, 1.0), basis_state(2, 1.0), opts));
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  const std::vector<std::string> expected = {"theta",          "order",          "state_a",         "state_b",
                                             "closed_form",    "certificate_lower", "certificate_id", "analytic_upper",
                                             "optimizer_lower", "feasibility_residual", "iterations", "converged",
                                             "bracket_width",  "divergent",      "divergence_slope"};
  EXPECT_EQ(keys, expected);
  EXPECT_TRUE(j.at("optimizer_lower").is_null());
}

TEST(Specs, Parsing) {
  EXPECT_EQ(*parse_state_spec("basis:3", 1.0).basis_index(), 3u);
  const auto z = parse_state_spec("zeta:1.2:1000", 1.0);
  EXPECT_EQ(z.zeta_profile()->cutoff, 1000u);
  const auto f = parse_state_spec("finite:1,0.5+0.5i,-2i", 1.0);
  EXPECT_EQ(f.support(), 3u);
  EXPECT_NEAR(std::abs(f.coefficient(2) / f.coefficient(0) - Complex(0, -2)), 0.0, 1e-15);
  EXPECT_THROW(parse_state_spec("basis", 1.0), ParameterError);
  EXPECT_THROW(parse_state_spec("basis:-1", 1.0), ParameterError);
  EXPECT_THROW(parse_state_spec("zeta:1.2", 1.0), ParameterError);
  EXPECT_THROW(parse_state_spec("zeta:0.9:10", 1.0), ParameterError);
  EXPECT_THROW(parse_state_spec("gauss:1", 1.0), ParameterError);
  EXPECT_EQ(parse_probe_spec("zeta:1.3").kind, ProbeStateSpec::Kind::Zeta);
  EXPECT_EQ(parse_lattice("3,-4"), (Lattice{3, -4}));
  EXPECT_THROW(parse_lattice("3"), ParameterError);
}

TEST(Csv, ProbeColumns) {
  const auto series = asymptotic_fit(ProbeStateSpec::basis(0), ProbeStateSpec::zeta(1.2), geometric_grid(100, 1000, 2));
  std::ostringstream os;
  write_probe_csv(os, series);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "m0,B,log_m0,log_B");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, series.m0_grid.size());
}

TEST(Cli, MoyalDistanceExample) {
  const auto r = cli({"moyal-distance", "--theta", "1", "--a", "basis:0", "--b", "basis:1", "--order", "8"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j.at("closed_form").get<double>(), 0.70711, 1e-5);
  EXPECT_NEAR(j.at("optimizer_lower").get<double>(), 1 / std::numbers::sqrt2, 1e-3);
}

TEST(Cli, EqualStatesGiveZeros) {
  const auto r = cli({"moyal-distance", "--a", "basis:3", "--b", "basis:3", "--order", "6"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("closed_form").get<double>(), 0.0);
  EXPECT_EQ(j.at("certificate_lower").get<double>(), 0.0);
  EXPECT_EQ(j.at("analytic_upper").get<double>(), 0.0);
  EXPECT_NEAR(j.at("optimizer_lower").get<double>(), 0.0, 1e-12);
}

TEST(Cli, ZetaWithProbeIsBoundsOnly) {
  const auto r = cli({"moyal-distance", "--a", "basis:0", "--b", "zeta:1.2:100000", "--probe"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j.at("divergent").get<bool>());
  EXPECT_TRUE(j.at("analytic_upper").is_null());
  EXPECT_NEAR(j.at("divergence_slope").get<double>(), 0.3, 0.05);
}

TEST(Cli, TorusExample) {
  const auto r = cli({"torus-distance", "--theta", "0.37", "--m", "3,4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j.at("analytic_upper").get<double>(), 0.031831, 1e-6);
  EXPECT_NEAR(j.at("reference_value").get<double>(), 1 / (10 * std::numbers::pi), 1e-12);
  EXPECT_EQ(cli({"torus-distance", "--theta", "1.5", "--m", "1,0"}).code, kExitParameterError);
  EXPECT_EQ(cli({"torus-distance", "--m", "0,0"}).code, kExitParameterError);
}

TEST(Cli, ProbeCsvAndSummary) {
  const auto r = cli({"probe", "--pair", "zeta:1.2,basis:0", "--grid", "1e3:1e5", "--points-per-decade", "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("m0,B,log_m0,log_B\n", 0), 0u);
  const Json summary = Json::parse(r.err);
  EXPECT_NEAR(summary.at("fitted_slope").get<double>(), 0.3, 0.05);
  EXPECT_EQ(cli({"probe", "--pair", "zeta:1.2,zeta:1.2", "--grid", "1e2:1e3"}).code, kExitParameterError);
}

TEST(Cli, VerifyAndBallCheck) {
  const auto v = cli({"verify", "--suite", "algebra"});
  EXPECT_EQ(v.code, kExitOk) << v.out;
  EXPECT_EQ(v.out.rfind("PASS algebra", 0), 0u);
  EXPECT_EQ(cli({"verify", "--suite", "nonsense"}).code, kExitParameterError);

  const auto in = cli({"ball-check", "--ahat", "5"});
  ASSERT_EQ(in.code, kExitOk);
  EXPECT_TRUE(Json::parse(in.out).at("member").get<bool>());

  const auto path = temp_file("element.json");
  {
    std::ofstream f(path);
    f << to_json(ahat(2, 1.0) * Complex(2.0)).dump();
  }
  const auto out = cli({"ball-check", "--element", path.string()});
  ASSERT_EQ(out.code, kExitOk) << out.err;
  const Json j = Json::parse(out.out);
  EXPECT_FALSE(j.at("member").get<bool>());
  EXPECT_FALSE(j.at("violations").empty());
  std::filesystem::remove(path);

  EXPECT_EQ(cli({"ball-check", "--ahat", "1", "--astep", "1"}).code, kExitParameterError);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"moyal-distance", "--a", "basis:0"}).code, kExitParameterError);
  EXPECT_EQ(cli({"moyal-distance", "--a", "basis:0", "--b", "bogus:1"}).code, kExitParameterError);
  EXPECT_EQ(cli({"moyal-distance", "--theta", "-1", "--a", "basis:0", "--b", "basis:1"}).code, kExitParameterError);
  EXPECT_EQ(cli({"no-such-command"}).code, kExitParameterError);
  const auto capped = cli({"moyal-distance", "--a", "finite:1,1i", "--b", "basis:3", "--order", "8", "--max-iter", "50"});
  EXPECT_EQ(capped.code, kExitNotConverged) << capped.err;
  EXPECT_NO_THROW(Json::parse(capped.out));
}

TEST(Cli, DeterministicOutputAndFiles) {
  const std::vector<std::string> args = {"moyal-distance", "--a", "finite:1,0.5i", "--b", "basis:2", "--order", "6"};
  const auto first = cli(args);
  const auto second = cli(args);
  EXPECT_EQ(first.out, second.out);

  const auto spec = temp_file("spec.json");
  const auto report = temp_file("report.json");
  {
    std::ofstream f(spec);
    f << R"({"a": "basis:0", "b": "basis:1", "order": 8})";
  }
  const auto r = cli({"moyal-distance", "--spec-file", spec.string(), "--out", report.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::ifstream in(report);
  const Json j = Json::parse(in);
  EXPECT_EQ(j.at("order").get<int>(), 8);
  EXPECT_EQ(j.at("state_b").get<std::string>(), "basis:1");
  std::filesystem::remove(spec);
  std::filesystem::remove(report);

  const auto csv = cli({"torus-distance", "--m", "1,0", "--format", "csv"});
  ASSERT_EQ(csv.code, kExitOk);
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 2);
}
