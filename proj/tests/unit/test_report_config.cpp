#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "shearhopf/errors.hpp"
#include "shearhopf/report_io.hpp"
#include "shearhopf/run_config.hpp"

using namespace shearhopf;

namespace {

HopfReport sample_report() {
  HopfReport r;
  r.b = {98.1234567890123, -12.5};
  r.c = {0.1 / 3.0, 1e-300};
  r.d_pair = {64.29156601, -671.892847};
  r.mu2 = -1.5247200123456789;
  r.omega2 = 949.0676980123;
  r.sigma_coeff = 196.0532761;
  r.supercritical = false;
  r.cross_checks.b_theorem = {1.0, 2.0};
  r.cross_checks.b_direct = {1.0 + 1e-9, 2.0};
  r.cross_checks.c_theorem = {-3.0, 0.25};
  r.cross_checks.c_direct = {-3.0, 0.25 + 1e-12};
  r.cross_checks.b_rel_diff = 1.8e-7;
  r.cross_checks.c_rel_diff = 2e-9;
  r.cross_checks.dlambda_dnu_fd = {64.2915656, -671.892848};
  r.cross_checks.adjoint_rel_diff = 2.2e-9;
  r.cross_checks.v20_limit = 0.123;
  r.cross_checks.v20_limit_formula = 0.1230000001;
  r.alpha = 0.18;
  r.nu0 = 7.143443916204e-06;
  r.omega0 = -2.238238006253e-02;
  r.dre_dnu = 64.3;
  r.profile_name = "exponential";
  r.n_points = 193;
  r.y_max = 25.0 / 0.081;
  r.stretch = 3.7;
  r.eta = 0.081;
  r.tol = 1e-10;
  return r;
}

}  // namespace

TEST_CASE("report JSON round trip is exact") {
  const HopfReport r = sample_report();
  const nlohmann::json j = report_to_json(r);
  CHECK(j.at("verdict") == "subcritical");
  CHECK(j.at("schema_version") == kReportSchemaVersion);
  const auto& cc = j.at("cross_checks");
  for (const char* k : {"b_theorem", "b_direct", "c_theorem", "c_direct"}) CHECK(cc.contains(k));

  const HopfReport s = report_from_json(nlohmann::json::parse(j.dump()));
  CHECK(s.b == r.b);
  CHECK(s.c == r.c);
  CHECK(s.d_pair == r.d_pair);
  CHECK(s.mu2 == r.mu2);
  CHECK(s.omega2 == r.omega2);
  CHECK(s.sigma_coeff == r.sigma_coeff);
  CHECK(s.supercritical == r.supercritical);
  CHECK(s.cross_checks.b_theorem == r.cross_checks.b_theorem);
  CHECK(s.cross_checks.b_direct == r.cross_checks.b_direct);
  CHECK(s.cross_checks.c_theorem == r.cross_checks.c_theorem);
  CHECK(s.cross_checks.c_direct == r.cross_checks.c_direct);
  CHECK(s.cross_checks.b_rel_diff == r.cross_checks.b_rel_diff);
  CHECK(s.cross_checks.c_rel_diff == r.cross_checks.c_rel_diff);
  CHECK(s.cross_checks.dlambda_dnu_fd == r.cross_checks.dlambda_dnu_fd);
  CHECK(s.cross_checks.adjoint_rel_diff == r.cross_checks.adjoint_rel_diff);
  CHECK(s.cross_checks.v20_limit == r.cross_checks.v20_limit);
  CHECK(s.cross_checks.v20_limit_formula == r.cross_checks.v20_limit_formula);
  CHECK(s.alpha == r.alpha);
  CHECK(s.nu0 == r.nu0);
  CHECK(s.omega0 == r.omega0);
  CHECK(s.dre_dnu == r.dre_dnu);
  CHECK(s.profile_name == r.profile_name);
  CHECK(s.n_points == r.n_points);
  CHECK(s.y_max == r.y_max);
  CHECK(s.stretch == r.stretch);
  CHECK(s.eta == r.eta);
  CHECK(s.tol == r.tol);
  CHECK(report_to_json(s).dump() == j.dump());
}

TEST_CASE("report JSON rejects other schemas") {
  nlohmann::json j = report_to_json(sample_report());
  j["schema_version"] = kReportSchemaVersion + 1;
  CHECK_THROWS_AS(report_from_json(j), InvalidParameter);
  j = report_to_json(sample_report());
  j.erase("b");
  CHECK_THROWS_AS(report_from_json(j), InvalidParameter);
}

TEST_CASE("summary and emitted files") {
  const HopfReport r = sample_report();
  const std::string text = report_summary(r, {"abc123", "shearhopf hopf"});
  CHECK(text.find("sigma_eps = 2*Re(b-c)*eps^2 = ") != std::string::npos);
  CHECK(text.find("subcritical") != std::string::npos);
  CHECK(text.find("abc123") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "shearhopf_report_test";
  std::filesystem::remove_all(dir);
  const auto paths = emit_report(r, dir.string(), {"abc123", "cmd"});
  REQUIRE(paths.size() == 2);
  for (const auto& p : paths) CHECK(std::filesystem::exists(p));
  std::ifstream is(dir / "hopf_report.json");
  const HopfReport back = report_from_json(nlohmann::json::parse(is));
  CHECK(back.mu2 == r.mu2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_config(
      "# comment\n[profile]\nname = tanh\nscale = 2.5\n\n[marginal]\nalpha = 0.2  # inline\n");
  CHECK(c.profile == "tanh");
  CHECK(c.profile_scale == 2.5);
  CHECK(c.alpha == 0.2);
  CHECK(c.nu_lo == RunConfig{}.nu_lo);

  CHECK_THROWS_AS(parse_config("[profile]\nflavour = x\n"), InvalidParameter);
  CHECK_THROWS_AS(parse_config("alpha = 0.2\n"), InvalidParameter);
  CHECK_THROWS_AS(parse_config("[marginal\nalpha = 0.2\n"), InvalidParameter);
  CHECK_THROWS_AS(parse_config("[marginal]\nalpha = fast\n"), InvalidParameter);
}

TEST_CASE("config dump round trip and hash") {
  RunConfig c;
  c.set("grid.points", "257");
  c.set("simulate.epsilon", "0.00051234567890123");
  c.set("profile.name", "tanh");
  const RunConfig d = parse_config(c.dump());
  CHECK(d.dump() == c.dump());
  CHECK(d.hash() == c.hash());
  CHECK(d.grid.n_points == 257);
  CHECK(d.epsilon == 0.00051234567890123);
  CHECK(RunConfig{}.hash() == RunConfig{}.hash());
  CHECK(c.hash() != RunConfig{}.hash());
  CHECK_THROWS_AS(c.set("grid.colour", "1"), InvalidParameter);
  CHECK_THROWS_AS(c.set("points", "1"), InvalidParameter);
  for (const auto& k : config_schema()) CHECK(c.dump().find(k.key.substr(k.key.find('.') + 1)) != std::string::npos);
}
