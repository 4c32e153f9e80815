#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "conelab/run.hpp"

using namespace conelab;
namespace fs = std::filesystem;

namespace {

nlohmann::json read_report(const std::string& path) {
  std::ifstream f(path);
  return nlohmann::json::parse(f);
}

RunConfig base(const std::string& sub, const std::string& dir) {
  RunConfig c;
  c.subcommand = sub;
  c.output_dir = (fs::temp_directory_path() / "conelab_unit" / dir).string();
  return c;
}

}  // namespace

TEST_SUITE("run") {
  TEST_CASE("heat-check passes and reports its errors") {
    const RunOutcome o = run(base("heat-check", "heat"));
    CHECK(o.exit_code == 0);
    const auto j = read_report(o.report_path);
    CHECK(j["schema_version"] == 1);
    CHECK(j["status"] == "pass");
    CHECK(j["result"]["circle_kernel"]["max_relative_error"].get<double>() < 1e-8);
    CHECK(j["seed"] == 12345);
    CHECK(j.contains("config_text"));
    CHECK(j["tolerances"]["heat"] == 1e-8);
  }

  TEST_CASE("reports are deterministic apart from the timestamp") {
    RunConfig c = base("mu", "det");
    c.N = 300;
    c.preset = "perturbed_suspension";
    c.tau = 0.1;
    const RunOutcome a = run(c);
    auto ja = read_report(a.report_path);
    const RunOutcome b = run(c);
    auto jb = read_report(b.report_path);
    ja.erase("timestamp");
    jb.erase("timestamp");
    CHECK(ja.dump() == jb.dump());
  }

  TEST_CASE("normalization mismatch is an operational error") {
    RunConfig c = base("flow", "mismatch");
    c.normalization = "shrink";
    c.flow_entropy = "mu_plus";
    c.N = 100;
    const RunOutcome o = run(c);
    CHECK(o.exit_code == 1);
    REQUIRE(o.error.has_value());
    CHECK(*o.error == ErrorCode::normalization);
  }

  TEST_CASE("violated property gives exit code 2 with a report") {
    RunConfig c = base("lambda", "strict");
    c.N = 200;
    c.tol_el = 1e-30;
    const RunOutcome o = run(c);
    CHECK(o.exit_code == 2);
    CHECK(read_report(o.report_path)["status"] == "fail");
  }

  TEST_CASE("convergence study writes a CSV with header") {
    RunConfig c = base("convergence", "conv");
    c.N0 = 100;
    c.refinements = 3;
    const RunOutcome o = run(c);
    CHECK(o.exit_code == 0);
    std::ifstream f(fs::path(o.report_path).parent_path() / "convergence.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header == "N,value,difference,order");
    const auto j = read_report(o.report_path);
    CHECK(j["result"]["orders"].back().get<double>() == doctest::Approx(2.0).epsilon(0.1));
  }

  TEST_CASE("output root override") {
    const fs::path root = fs::temp_directory_path() / "conelab_unit_root";
    setenv("CONELAB_OUTPUT_ROOT", root.c_str(), 1);
    RunConfig c;
    c.subcommand = "link-check";
    c.output_dir = "rel";
    const RunOutcome o = run(c);
    unsetenv("CONELAB_OUTPUT_ROOT");
    CHECK(o.exit_code == 0);
    CHECK(fs::exists(root / "rel" / "report.json"));
    CHECK(fs::exists(root / "rel" / "effective.ini"));
  }

  TEST_CASE("effective config in the output re-runs identically") {
    RunConfig c = base("lambda", "rt1");
    c.N = 400;
    const RunOutcome a = run(c);
    RunConfig d = parse_config_file((fs::path(a.report_path).parent_path() / "effective.ini").string());
    d.output_dir = base("lambda", "rt2").output_dir;
    const RunOutcome b = run(d);
    auto ja = read_report(a.report_path), jb = read_report(b.report_path);
    CHECK(ja["result"].dump() == jb["result"].dump());
  }
}
