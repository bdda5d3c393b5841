#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "airdrop/agent_sim.hpp"
#include "airdrop/error.hpp"
#include "airdrop/pipeline.hpp"
#include "airdrop/render.hpp"
#include "airdrop/scenario.hpp"
#include "json.hpp"

namespace airdrop {

namespace fs = std::filesystem;

namespace detail {

inline void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Writes every artifact the report has data for, then report.json and
/// timings.json. Returns the relative paths written.
inline std::vector<std::string> write_artifacts(RunReport& r, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  std::vector<std::string> files;
  auto put = [&](const std::string& rel, const std::string& text) {
    detail::write_text(out_dir / rel, text);
    files.push_back(rel);
  };
  if (r.coverage_plan) {
    put("plan_coverage.json", plan_json(*r.coverage_plan).dump(2) + "\n");
    put("coverage_path.svg", render_svg(r, SvgStyle::CoveragePath));
  }
  if (r.drop_plan) {
    put("plan_drop.json", plan_json(*r.drop_plan).dump(2) + "\n");
    put("drop_overview.svg", render_svg(r, SvgStyle::DropOverview));
  }
  for (const auto& t : r.trajectories) {
    std::ostringstream os;
    write_trajectory_csv(os, t);
    put(trajectory_file(t), os.str());
  }
  if (r.mgv) {
    put("mgv_plan.json", mgv_json(r).dump(2) + "\n");
    put("mgv_network.svg", render_svg(r, SvgStyle::MgvNetwork));
  }
  const CoverageGrid* grid = r.descent_grid ? &*r.descent_grid : r.first_sample_grid ? &*r.first_sample_grid : nullptr;
  if (grid) {
    std::ostringstream os;
    grid->write_pgm(os);
    put("coverage.pgm", os.str());
  }
  files.push_back("report.json");
  files.push_back("timings.json");
  r.artifacts = files;
  detail::write_text(out_dir / "report.json", report_json(r).dump(2) + "\n");
  json timings = json::object();
  for (const auto& [name, secs] : r.timings) timings[name] = secs;
  detail::write_text(out_dir / "timings.json", timings.dump(2) + "\n");
  return files;
}

/// Full pipeline into `out_dir`. On failure the artifacts of completed
/// phases are kept, a FAILED marker holds the error line, and the error is
/// rethrown.
inline RunReport run_scenario(const Scenario& scenario, const fs::path& out_dir, Phase last = Phase::Evaluation) {
  RunReport r;
  r.scenario = scenario;
  fs::create_directories(out_dir);
  fs::remove(out_dir / "FAILED");
  try {
    execute_phases(r, last);
  } catch (const Error& e) {
    try {
      write_artifacts(r, out_dir);
    } catch (const Error&) {
      // The marker below still records the original cause.
    }
    detail::write_text(out_dir / "FAILED", std::string(e.what()) + "\n");
    throw;
  }
  write_artifacts(r, out_dir);
  return r;
}

struct AuditLine {
  std::string name;
  double reported = 0.0;
  double recomputed = 0.0;
  bool ok = false;
};

struct AuditResult {
  std::vector<AuditLine> lines;
  bool ok = true;
};

/// Recomputes the coverage fractions in report.json from the emitted plan
/// and trajectory files.
inline AuditResult audit_run(const fs::path& out_dir) {
  json rep;
  try {
    rep = json::parse(detail::read_text(out_dir / "report.json"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "report.json: " + std::string(e.what()));
  }
  AuditResult result;
  try {
    const auto& a = rep.at("area");
    const auto area = AreaOfInterest::make({a.at("origin")[0].get<double>(), a.at("origin")[1].get<double>()},
                                           a.at("d_x").get<double>(), a.at("d_y").get<double>());
    const double res = rep.at("grid").at("resolution").get<double>();
    CameraModel cam;
    cam.fov = rep.at("camera").at("fov").get<double>();
    cam.footprint = rep.at("camera").at("footprint") == "disk" ? FootprintShape::Disk : FootprintShape::Square;
    const double z_cutoff = rep.at("z_cutoff").get<double>();
    const auto& cov = rep.at("coverage");

    auto check = [&](const char* name, const CoverageGrid& g) {
      AuditLine line{name, cov.at(name).get<double>(), r9(g.covered_fraction()), false};
      line.ok = line.reported == line.recomputed;
      result.ok = result.ok && line.ok;
      result.lines.push_back(line);
    };

    if (!cov.at("rapid").is_null()) {
      const json plan = json::parse(detail::read_text(out_dir / "plan_coverage.json"));
      CoverageGrid g(area, res);
      for (const auto& w : plan.at("waypoints")) {
        g.mark_footprint(Pose4{w.at("x").get<double>(), w.at("y").get<double>(), w.at("z").get<double>(), 0.0}, cam);
      }
      check("rapid", g);
    }
    if (!cov.at("first_sample").is_null()) {
      const json plan = json::parse(detail::read_text(out_dir / "plan_drop.json"));
      CoverageGrid g(area, res);
      for (const auto& d : plan.at("drop_points")) {
        g.mark_disk({d.at("x").get<double>(), d.at("y").get<double>()},
                    footprint_halfwidth(d.at("altitude").get<double>(), cam.fov));
      }
      check("first_sample", g);
    }
    if (!cov.at("descent").is_null()) {
      CoverageGrid g(area, res);
      for (const auto& t : rep.at("trajectories")) {
        std::istringstream csv(detail::read_text(out_dir / t.at("file").get<std::string>()));
        std::string row;
        std::getline(csv, row);  // header
        while (std::getline(csv, row)) {
          double v[7];
          if (std::sscanf(row.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3], &v[4], &v[5],
                          &v[6]) != 7) {
            throw Error(ErrorCode::ParseError, "bad trajectory row in " + t.at("file").get<std::string>());
          }
          if (v[3] > z_cutoff) g.mark_disk({v[1], v[2]}, footprint_halfwidth(v[3], cam.fov));
        }
      }
      check("descent", g);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "run artifacts: " + std::string(e.what()));
  }
  return result;
}

}  // namespace airdrop
