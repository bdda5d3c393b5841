// airdrop: mission planning pipeline driver.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "airdrop/pipeline.hpp"
#include "airdrop/render.hpp"
#include "airdrop/run.hpp"
#include "airdrop/scenario.hpp"
#include "airdrop/tsp.hpp"

namespace {

using namespace airdrop;

struct CommonArgs {
  std::string scenario;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> resolution;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool needs_out = true) {
  cmd->add_option("--scenario", a.scenario, "Scenario JSON file")->required();
  if (needs_out) cmd->add_option("--out", a.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", a.seed, "Override the scenario seed");
  cmd->add_option("--resolution", a.resolution, "Override the coverage grid resolution (m)");
}

Scenario load(const CommonArgs& a) {
  Scenario s = load_scenario(a.scenario);
  if (a.seed) s.seed = *a.seed;
  if (a.resolution) {
    if (!(*a.resolution > 0.0)) throw Error(ErrorCode::ConfigError, "--resolution: must be > 0");
    s.resolution = *a.resolution;
  }
  return s;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

void print_summary(const RunReport& r, const std::string& out) {
  std::printf("ok: %s -> %s\n", r.scenario.name.c_str(), out.c_str());
  if (r.coverage_plan) {
    std::printf("  rapid coverage: %zu viewpoints, tour %.1f m, coverage %s\n", r.coverage_plan->viewpoints.size(),
                r.coverage_plan->total_length, fmt_opt(r.coverage.rapid).c_str());
  }
  if (r.drop_plan) {
    std::printf("  drop tour: %zu drop points, %.1f m, first-sample coverage %s\n", r.drop_plan->drop_points.size(),
                r.drop_plan->total_length, fmt_opt(r.coverage.first_sample).c_str());
  }
  if (r.has(Phase::Descents)) {
    std::printf("  descents: %zu trajectories, coverage %s\n", r.trajectories.size(),
                fmt_opt(r.coverage.descent).c_str());
  }
  if (r.mgv) {
    std::printf("  mgv: %zu vehicles, assignment %.1f m (%s), connected=%s\n", r.mgv->landing.size(),
                r.mgv->assignment.total_distance, r.mgv->assignment.used_fallback ? "hungarian" : "enumeration",
                r.mgv->network.connected ? "true" : "false");
  }
}

Phase phase_for_style(SvgStyle s) {
  switch (s) {
    case SvgStyle::CoveragePath: return Phase::RapidCoverage;
    case SvgStyle::DropOverview: return Phase::Descents;
    case SvgStyle::MgvNetwork: return Phase::Mgv;
  }
  return Phase::Evaluation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aerial-drop mission planner: coverage tour, drop planning, descent simulation, MGV redistribution"};
  app.require_subcommand(1);

  CommonArgs common;
  struct StageCmd {
    const char* name;
    const char* help;
    Phase last;
  };
  const StageCmd stages[] = {
      {"plan-coverage", "Plan the rapid high-altitude coverage tour", Phase::RapidCoverage},
      {"plan-drop", "Plan drop points and the drop tour", Phase::DropTour},
      {"simulate", "Plan and simulate every agent descent", Phase::Descents},
      {"mgv-plan", "Everything up to MGV redistribution", Phase::Mgv},
      {"run", "Full pipeline with report", Phase::Evaluation},
  };
  std::vector<std::pair<CLI::App*, Phase>> stage_cmds;
  for (const auto& s : stages) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, common);
    stage_cmds.emplace_back(cmd, s.last);
  }

  std::string style = "drop_overview";
  std::string svg_file;
  auto* render = app.add_subcommand("render", "Render one SVG figure");
  add_common(render, common);
  render->add_option("--style", style, "coverage_path | drop_overview | mgv_network")->capture_default_str();
  render->add_option("--file", svg_file, "Output SVG path (default <out>/<style>.svg)");

  std::string audit_dir;
  auto* audit = app.add_subcommand("audit", "Recompute report coverage from emitted files");
  audit->add_option("--out", audit_dir, "Run output directory")->required();

  std::string matrix_file;
  auto* export_tsp = app.add_subcommand("export-tsp", "Write the coverage tour cost matrix for an external solver");
  add_common(export_tsp, common, false);
  export_tsp->add_option("--file", matrix_file, "Matrix output path")->required();

  std::string tour_file;
  auto* import_tour = app.add_subcommand("import-tour", "Build the coverage plan from an external tour");
  add_common(import_tour, common);
  import_tour->add_option("--tour", tour_file, "Tour file: n whitespace-separated indices")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "ConfigError: %s\n", one_line(e.what()).c_str());
    return 2;
  }

  try {
    for (const auto& [cmd, last] : stage_cmds) {
      if (!cmd->parsed()) continue;
      const RunReport r = run_scenario(load(common), common.out, last);
      print_summary(r, common.out);
      return 0;
    }
    if (render->parsed()) {
      const SvgStyle s = parse_svg_style(style);
      RunReport r;
      r.scenario = load(common);
      execute_phases(r, phase_for_style(s));
      const fs::path path = svg_file.empty() ? fs::path(common.out) / (style + ".svg") : fs::path(svg_file);
      detail::write_text(path, render_svg(r, s));
      std::printf("ok: wrote %s\n", path.string().c_str());
      return 0;
    }
    if (audit->parsed()) {
      const AuditResult res = audit_run(audit_dir);
      for (const auto& l : res.lines) {
        std::printf("%s %s reported=%.9g recomputed=%.9g\n", l.ok ? "MATCH" : "MISMATCH", l.name.c_str(), l.reported,
                    l.recomputed);
      }
      if (!res.ok) {
        std::fprintf(stderr, "AuditMismatch: report coverage differs from recomputation\n");
        return 1;
      }
      return 0;
    }
    if (export_tsp->parsed()) {
      const Scenario s = load(common);
      const CostMatrix m = rapid_coverage_cost_matrix(s.area, s.coverage_altitude, s.camera, s.carrier, s.seed);
      std::ostringstream os;
      write_cost_matrix(os, m);
      detail::write_text(fs::absolute(matrix_file), os.str());
      std::printf("ok: %zu x %zu matrix -> %s\n", m.size(), m.size(), matrix_file.c_str());
      return 0;
    }
    if (import_tour->parsed()) {
      const Scenario s = load(common);
      std::ifstream in(tour_file);
      if (!in) throw Error(ErrorCode::IoError, "cannot open tour file " + tour_file);
      const std::size_t n = required_viewpoints(s.area, s.coverage_altitude, s.camera.fov);
      const auto order = read_tour_order(in, n);
      const MissionPlan plan = plan_rapid_coverage(s.area, s.coverage_altitude, s.camera, s.carrier, s.seed, {}, order);
      detail::write_text(fs::path(common.out) / "plan_coverage.json", plan_json(plan).dump(2) + "\n");
      std::printf("ok: imported tour of %zu viewpoints, length %.1f m\n", n, plan.total_length);
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", one_line(e.what()).c_str());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "IoError: %s\n", one_line(e.what()).c_str());
    return 2;
  }
  return 0;
}
