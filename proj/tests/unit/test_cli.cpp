#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace shearhopf;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  const fs::path out = fresh_dir("shearhopf_cli_usage");
  CHECK(run_command({"hopf", "--no-such-flag", "--out", out.string()}) == kExitUsage);
  CHECK(run_command({"regions", "--set", "regions.colour=red", "--out", out.string()}) == kExitUsage);
  CHECK(run_command({"regions", "--set", "regions.samples", "--out", out.string()}) == kExitUsage);
  CHECK(run_command({}) == kExitUsage);
  CHECK(run_command({"frobnicate"}) == kExitUsage);
  fs::remove_all(out);
}

TEST_CASE("regions output is deterministic") {
  const fs::path a = fresh_dir("shearhopf_cli_regions_a"), b = fresh_dir("shearhopf_cli_regions_b");
  const std::vector<std::string> common{"regions", "--nu", "0.01", "--alpha", "0.5", "--eta", "0.2"};
  auto args_a = common, args_b = common;
  args_a.insert(args_a.end(), {"--out", a.string()});
  args_b.insert(args_b.end(), {"--out", b.string()});
  REQUIRE(run_command(args_a) == kExitOk);
  REQUIRE(run_command(args_b) == kExitOk);
  CHECK(fs::exists(a / "regions.gp"));
  const std::string csv = slurp(a / "regions.csv");
  CHECK(!csv.empty());
  CHECK(csv == slurp(b / "regions.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("unbracketed marginal search exits with 2 and a diagnostic") {
  const fs::path out = fresh_dir("shearhopf_cli_bracket");
  const int code = run_command({"hopf", "--profile", "exponential", "--set", "marginal.nu_lo=8e-6", "--set",
                                "marginal.nu_hi=9e-6", "--seed-re", "1e-4", "--seed-im", "-0.0235", "--out",
                                out.string()});
  CHECK(code == kExitNumerical);
  REQUIRE(fs::exists(out / "diagnostic.txt"));
  CHECK(slurp(out / "diagnostic.txt").find("not bracketed") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("hopf writes a report with a verdict") {
  const fs::path out = fresh_dir("shearhopf_cli_hopf");
  REQUIRE(run_command({"hopf", "--profile", "exponential", "--seed-re", "0", "--seed-im", "-0.0224", "--out",
                       out.string()}) == kExitOk);
  std::ifstream is(out / "hopf_report.json");
  const nlohmann::json j = nlohmann::json::parse(is);
  const std::string verdict = j.at("verdict");
  CHECK((verdict == "supercritical" || verdict == "subcritical"));
  CHECK(fs::exists(out / "summary.txt"));
  CHECK(fs::exists(out / "config.txt"));
  fs::remove_all(out);
}
