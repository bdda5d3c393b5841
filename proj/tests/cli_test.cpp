#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "airdrop/pipeline.hpp"
#include "airdrop/render.hpp"
#include "airdrop/run.hpp"
#include "airdrop/scenario.hpp"
#include "oracles/xml_check.hpp"

namespace airdrop {
namespace {

const fs::path kScenarios = AIRDROP_SCENARIO_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("airdrop_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

struct CliResult {
  int code = -1;
  std::string out, err;
};

CliResult run_cli(const std::string& args) {
  const fs::path dir = scratch("io");
  const std::string cmd = std::string(AIRDROP_CLI_PATH) + " " + args + " >" + (dir / "o").string() + " 2>" +
                          (dir / "e").string();
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "o");
  r.err = slurp(dir / "e");
  return r;
}

Scenario fixture(const std::string& name) { return load_scenario((kScenarios / name).string()); }

TEST(LoadScenario, MinimalFileGetsDefaults) {
  const Scenario s = fixture("minimal.json");
  EXPECT_DOUBLE_EQ(s.area.d_x, 200.0);
  EXPECT_DOUBLE_EQ(s.camera.fov, 1.2);
  EXPECT_EQ(s.camera.footprint, FootprintShape::Square);
  EXPECT_EQ(s.roster.total(), 1u);
  EXPECT_EQ(s.roster.static_sensor, 1u);
  EXPECT_EQ(s.seed, 0u);
  EXPECT_TRUE(s.omega_from_heuristic);
  EXPECT_DOUBLE_EQ(s.descent.g, 9.80665);
  EXPECT_DOUBLE_EQ(s.grid_resolution(), 150.0 / 500.0);
}

TEST(LoadScenario, AirportFixture) {
  const Scenario s = fixture("airport_8x8.json");
  EXPECT_EQ(s.roster.mav, 8u);
  EXPECT_EQ(s.roster.mgv, 8u);
  EXPECT_EQ(s.roster.static_sensor, 0u);
  EXPECT_DOUBLE_EQ(s.area.d_x, 1600.0);
  EXPECT_DOUBLE_EQ(s.area.d_y, 900.0);
  EXPECT_NE(s.name.find("stand-in"), std::string::npos);
  ASSERT_TRUE(s.reference.has_value());
  EXPECT_NEAR(s.effective_comm_range(), 1.2 * std::sqrt(1600.0 * 900.0 / 8.0), 1e-9);
}

void expect_config_error(const std::string& text, const std::string& field) {
  try {
    parse_scenario(text);
    FAIL() << "accepted: " << text;
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    EXPECT_EQ(std::string(e.what()).find("ConfigError: " + field + ":"), 0u) << e.what();
  }
}

TEST(LoadScenario, ValidationNamesTheField) {
  expect_config_error(R"({"area":{"d_x":-5,"d_y":10},"roster":{"mav":1}})", "area.d_x");
  expect_config_error(R"({"area":{"d_x":5,"d_y":10}})", "roster");
  expect_config_error(R"({"area":{"d_x":5,"d_y":10},"roster":{"mav":0}})", "roster");
  expect_config_error(R"({"area":{"d_x":5,"d_y":10},"roster":{"mav":1},"camera":{"fov":4}})", "camera.fov");
  expect_config_error(R"({"area":{"d_x":5,"d_y":10},"roster":{"mav":1},"descent":{"dt":0.5}})", "descent.dt");
  expect_config_error(R"({"area":{"d_x":5,"d_y":10},"roster":{"mav":1},"drop":{"z_floor":50,"z_ceiling":10}})",
                      "drop.z_ceiling");
  expect_config_error(R"({"area":{"d_x":5,"d_y":10},"roster":{"mav":1},"mav":{"amplitud":0.3}})", "mav.amplitud");
  expect_config_error(R"({"area":{"d_x":5,"d_y":10},"roster":{"mav":1.5}})", "roster.mav");
}

TEST(LoadScenario, SyntaxErrorReportsLineAndColumn) {
  try {
    parse_scenario("{\n  \"area\": ,\n}", "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("bad.json:2:"), std::string::npos) << e.what();
  }
  try {
    load_scenario("/nonexistent/scenario.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

TEST(RunScenario, MinimalSingleSensor) {
  Scenario s = fixture("minimal.json");
  const fs::path out = scratch("minimal");
  const RunReport r = run_scenario(s, out);
  ASSERT_EQ(r.drops.size(), 1u);
  ASSERT_EQ(r.trajectories.size(), 1u);
  EXPECT_EQ(r.trajectories[0].touchdown, r.drops[0].position);
  EXPECT_DOUBLE_EQ(*r.coverage.first_sample, 1.0);
  EXPECT_DOUBLE_EQ(*r.coverage.descent, 1.0);
  EXPECT_FALSE(r.mgv.has_value());
  for (const auto& f : r.artifacts) EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_FALSE(fs::exists(out / "FAILED"));
}

TEST(RunScenario, SensorScenarioEndToEnd) {
  const fs::path out = scratch("s8");
  const RunReport r = run_scenario(fixture("airport_8x8_sensors.json"), out);
  EXPECT_EQ(r.drops.size(), 16u);
  EXPECT_EQ(r.trajectories.size(), 16u);
  EXPECT_GE(*r.coverage.first_sample, 0.995);
  for (const auto& f : r.artifacts) EXPECT_TRUE(fs::exists(out / f)) << f;
  const json rep = json::parse(slurp(out / "report.json"));
  EXPECT_EQ(rep["trajectories"].size(), 16u);
  EXPECT_EQ(rep["drop_points"]["count"], 16);
  const std::string csv = slurp(out / rep["trajectories"][0]["file"].get<std::string>());
  EXPECT_EQ(csv.rfind("t,x,y,z,psi,roll,pitch\n", 0), 0u);
  const AuditResult audit = audit_run(out);
  EXPECT_TRUE(audit.ok);
  EXPECT_EQ(audit.lines.size(), 3u);
}

TEST(RunScenario, DeterministicArtifacts) {
  const Scenario s = fixture("airport_4x4_sensors.json");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const RunReport ra = run_scenario(s, a);
  run_scenario(s, b);
  for (const auto& f : ra.artifacts) {
    if (f == "timings.json") continue;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(RunScenario, FailureKeepsPartialOutputAndMarker) {
  Scenario s = fixture("minimal.json");
  s.descent.dt = 0.5;  // bypasses file validation; the simulator rejects it
  const fs::path out = scratch("fail");
  try {
    run_scenario(s, out);
    FAIL();
  } catch (const PhaseError& e) {
    EXPECT_EQ(e.phase(), Phase::Descents);
    EXPECT_EQ(exit_code_for(e), 4);
    EXPECT_NE(std::string(e.what()).find("phase descents"), std::string::npos);
  }
  EXPECT_TRUE(fs::exists(out / "FAILED"));
  EXPECT_TRUE(fs::exists(out / "plan_drop.json"));
  EXPECT_EQ(count_of(slurp(out / "FAILED"), "\n"), 1u);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(Error(ErrorCode::ConfigError, "x")), 2);
  EXPECT_EQ(exit_code_for(Error(ErrorCode::ParseError, "x")), 2);
  EXPECT_EQ(exit_code_for(PhaseError(Phase::DropPoints, Error(ErrorCode::DegenerateSites, "x"))), 3);
  EXPECT_EQ(exit_code_for(PhaseError(Phase::Descents, Error(ErrorCode::InvalidDrop, "x"))), 4);
  EXPECT_EQ(exit_code_for(Error(ErrorCode::InvalidTour, "x")), 3);
}

TEST(Render, SingleWaypointPlan) {
  Scenario s = fixture("minimal.json");
  s.coverage_altitude = 1000.0;
  RunReport r;
  r.scenario = s;
  execute_phases(r, Phase::RapidCoverage);
  ASSERT_EQ(r.coverage_plan->waypoints.size(), 1u);
  const std::string svg = render_svg(r, SvgStyle::CoveragePath);
  EXPECT_EQ(count_of(svg, "class=\"viewpoint\""), 1u);
  EXPECT_EQ(count_of(svg, "class=\"tour\""), 0u);
  std::string why;
  EXPECT_TRUE(oracle::well_formed_xml(svg, &why)) << why;
}

TEST(Render, DropOverviewCountsAndValidity) {
  RunReport r;
  r.scenario = fixture("airport_4x4_sensors.json");
  execute_phases(r);
  const std::string svg = render_svg(r, SvgStyle::DropOverview);
  EXPECT_EQ(count_of(svg, "class=\"cell\""), 8u);
  EXPECT_EQ(count_of(svg, "class=\"drop\""), 8u);
  for (SvgStyle st : {SvgStyle::CoveragePath, SvgStyle::DropOverview}) {
    const std::string doc = render_svg(r, st);
    std::string why;
    EXPECT_TRUE(oracle::well_formed_xml(doc, &why)) << why;
    // Every number in the document is finite.
    EXPECT_EQ(doc.find("nan"), std::string::npos);
    EXPECT_EQ(doc.find("inf"), std::string::npos);
  }
  try {
    render_svg(r, SvgStyle::MgvNetwork);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingPhase);
  }
}

TEST(Render, MgvNetwork) {
  RunReport r;
  r.scenario = fixture("airport_8x8.json");
  execute_phases(r);
  const std::string svg = render_svg(r, SvgStyle::MgvNetwork);
  std::string why;
  EXPECT_TRUE(oracle::well_formed_xml(svg, &why)) << why;
  EXPECT_EQ(count_of(svg, "class=\"assignment\""), 8u);
  EXPECT_EQ(count_of(svg, "class=\"comm\""), 8u);
  EXPECT_EQ(count_of(svg, "class=\"drive\""), 8u);
  RunReport empty;
  empty.scenario = r.scenario;
  EXPECT_THROW(render_svg(empty, SvgStyle::CoveragePath), Error);
}

TEST(Cli, RunAndAudit) {
  const fs::path out = scratch("cli_run");
  const auto r = run_cli("run --scenario " + (kScenarios / "minimal.json").string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "report.json"));
  const auto a = run_cli("audit --out " + out.string());
  EXPECT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(count_of(a.out, "MATCH "), 3u);

  json rep = json::parse(slurp(out / "report.json"));
  rep["coverage"]["first_sample"] = 0.5;
  std::ofstream(out / "report.json") << rep.dump(2);
  const auto bad = run_cli("audit --out " + out.string());
  EXPECT_NE(bad.code, 0);
  EXPECT_NE(bad.out.find("MISMATCH first_sample"), std::string::npos);
}

TEST(Cli, SeedAndResolutionOverrides) {
  const fs::path out = scratch("cli_over");
  const auto r = run_cli("plan-drop --scenario " + (kScenarios / "minimal.json").string() + " --out " +
                         out.string() + " --seed 9 --resolution 2.5");
  ASSERT_EQ(r.code, 0) << r.err;
  const json rep = json::parse(slurp(out / "report.json"));
  EXPECT_EQ(rep["seed"], 9);
  EXPECT_DOUBLE_EQ(rep["grid"]["resolution"].get<double>(), 2.5);
  EXPECT_FALSE(fs::exists(out / "trajectories"));
}

TEST(Cli, ConfigErrorIsOneLineExitTwo) {
  const fs::path dir = scratch("cli_cfg");
  std::ofstream(dir / "bad.json") << R"({"area":{"d_x":-1,"d_y":10},"roster":{"mav":1}})";
  const auto r = run_cli("run --scenario " + (dir / "bad.json").string() + " --out " + (dir / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("ConfigError: area.d_x:", 0), 0u) << r.err;
  EXPECT_EQ(count_of(r.err, "\n"), 1u);

  const auto missing = run_cli("run --out " + (dir / "o").string());
  EXPECT_EQ(missing.code, 2);
  EXPECT_EQ(missing.err.rfind("ConfigError:", 0), 0u);
}

TEST(Cli, RenderSubcommand) {
  const fs::path out = scratch("cli_render");
  const auto ok = run_cli("render --style coverage_path --scenario " + (kScenarios / "minimal.json").string() +
                          " --out " + out.string());
  ASSERT_EQ(ok.code, 0) << ok.err;
  EXPECT_TRUE(fs::exists(out / "coverage_path.svg"));
  const auto missing = run_cli("render --style mgv_network --scenario " +
                               (kScenarios / "minimal.json").string() + " --out " + out.string());
  EXPECT_EQ(missing.code, 3);
  EXPECT_EQ(missing.err.rfind("MissingPhase:", 0), 0u) << missing.err;
}

TEST(Cli, ExportAndImportTour) {
  const fs::path dir = scratch("cli_tsp");
  const std::string scen = (kScenarios / "airport_4x4_sensors.json").string();
  const auto ex = run_cli("export-tsp --scenario " + scen + " --file " + (dir / "m.txt").string());
  ASSERT_EQ(ex.code, 0) << ex.err;
  std::ifstream in(dir / "m.txt");
  const CostMatrix m = read_cost_matrix(in);
  EXPECT_EQ(m.size(), 16u);
  EXPECT_EQ(count_of(slurp(dir / "m.txt"), "\n"), 17u);

  std::ofstream(dir / "tour.txt") << "15 14 13 12 11 10 9 8 7 6 5 4 3 2 1 0\n";
  const auto im = run_cli("import-tour --scenario " + scen + " --tour " + (dir / "tour.txt").string() + " --out " +
                          (dir / "o").string());
  ASSERT_EQ(im.code, 0) << im.err;
  const json plan = json::parse(slurp(dir / "o" / "plan_coverage.json"));
  EXPECT_EQ(plan["waypoints"].size(), 17u);

  std::ofstream(dir / "dup.txt") << "0 0 1 2 3 4 5 6 7 8 9 10 11 12 13 14\n";
  const auto dup = run_cli("import-tour --scenario " + scen + " --tour " + (dir / "dup.txt").string() + " --out " +
                           (dir / "o").string());
  EXPECT_EQ(dup.code, 3);
  EXPECT_EQ(dup.err.rfind("InvalidTour:", 0), 0u) << dup.err;

  std::ofstream(dir / "junk.txt") << "0 x 1\n";
  const auto junk = run_cli("import-tour --scenario " + scen + " --tour " + (dir / "junk.txt").string() +
                            " --out " + (dir / "o").string());
  EXPECT_NE(junk.code, 0);
  EXPECT_EQ(junk.err.rfind("ParseError:", 0), 0u) << junk.err;
}

}  // namespace
}  // namespace airdrop
