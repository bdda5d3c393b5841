#pragma once

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "airdrop/agent_sim.hpp"
#include "airdrop/error.hpp"
#include "airdrop/mgv_planner.hpp"
#include "airdrop/mission_planner.hpp"
#include "airdrop/scenario.hpp"
#include "airdrop/sensing.hpp"
#include "json.hpp"

namespace airdrop {

enum class Phase { RapidCoverage, DropPoints, DropTour, Descents, Mgv, Evaluation };

inline std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::RapidCoverage: return "rapid_coverage";
    case Phase::DropPoints: return "drop_points";
    case Phase::DropTour: return "drop_tour";
    case Phase::Descents: return "descents";
    case Phase::Mgv: return "mgv";
    case Phase::Evaluation: return "evaluation";
  }
  return "?";
}

/// Library error tagged with the pipeline phase that raised it.
class PhaseError : public Error {
 public:
  PhaseError(Phase phase, const Error& cause)
      : Error(cause.code(), "phase " + std::string(phase_name(phase)) + ": " + cause.detail()), phase_(phase) {}

  Phase phase() const noexcept { return phase_; }

 private:
  Phase phase_;
};

/// 0 ok, 2 configuration, 3 planning, 4 simulation.
inline int exit_code_for(const Error& e) {
  if (const auto* p = dynamic_cast<const PhaseError*>(&e)) return p->phase() == Phase::Descents ? 4 : 3;
  switch (e.code()) {
    case ErrorCode::ConfigError:
    case ErrorCode::ParseError:
    case ErrorCode::IoError: return 2;
    case ErrorCode::InvalidDrop: return 4;
    default: return 3;
  }
}

/// Rounds to 9 significant digits, the precision of every serialized number.
inline double r9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

struct MgvOutcome {
  std::vector<std::string> agent_ids;
  std::vector<Pose4> landing;
  std::vector<Point2> targets;
  std::vector<GeodeticCoord> targets_wgs84;  // only with a geodetic reference
  Assignment assignment;
  std::vector<DubinsPath> paths;
  CommNetwork network;
};

struct CoverageSummary {
  std::optional<double> rapid;         // footprints at the coverage waypoints
  std::optional<double> first_sample;  // drop cones at release
  std::optional<double> descent;       // every descent sample above the cutoff
};

struct RunReport {
  Scenario scenario;
  std::optional<MissionPlan> coverage_plan;
  std::vector<DropPoint> drops;  // cell order, roster assigned
  std::optional<MissionPlan> drop_plan;
  std::optional<Pose4> entry;
  std::string entry_source;
  std::vector<DescentTrajectory> trajectories;  // drop-tour visiting order
  std::vector<AgentKind> trajectory_kinds;
  std::vector<std::optional<double>> trajectory_omegas;
  std::optional<MgvOutcome> mgv;
  CoverageSummary coverage;
  std::optional<CoverageGrid> descent_grid;
  std::optional<CoverageGrid> first_sample_grid;
  std::vector<std::pair<std::string, double>> timings;
  std::vector<std::string> artifacts;
  std::vector<Phase> completed;

  bool has(Phase p) const { return std::find(completed.begin(), completed.end(), p) != completed.end(); }
};

namespace detail {

inline double round_fraction(const CoverageGrid& g) { return r9(g.covered_fraction()); }

inline void run_rapid_coverage(RunReport& r) {
  const Scenario& s = r.scenario;
  if (!s.rapid_coverage) return;
  r.coverage_plan = plan_rapid_coverage(s.area, s.coverage_altitude, s.camera, s.carrier, s.seed);
  CoverageGrid grid(s.area, s.grid_resolution());
  for (const auto& w : r.coverage_plan->waypoints) {
    grid.mark_footprint(Pose4{r9(w.x), r9(w.y), r9(w.z), w.psi}, s.camera);
  }
  r.coverage.rapid = round_fraction(grid);
}

inline void run_drop_points(RunReport& r) {
  const Scenario& s = r.scenario;
  r.drops = plan_drop_points(s.area, s.roster.total(), s.camera, s.z_floor, s.z_ceiling, s.seed);
  assign_roster(r.drops, s.roster);
  CoverageGrid grid(s.area, s.grid_resolution());
  for (const auto& d : r.drops) {
    grid.mark_disk({r9(d.position.x), r9(d.position.y)}, footprint_halfwidth(r9(d.altitude), s.camera.fov));
  }
  r.coverage.first_sample = round_fraction(grid);
  r.first_sample_grid = std::move(grid);
}

inline void run_drop_tour(RunReport& r) {
  const Scenario& s = r.scenario;
  if (s.entry) {
    r.entry = *s.entry;
    r.entry_source = "scenario";
  } else if (r.coverage_plan) {
    r.entry = r.coverage_plan->waypoints.back();
    r.entry_source = "coverage_tour_end";
  } else {
    const Point2 c = s.area.center();
    const double psi = std::atan2(c.y - s.area.min_y(), c.x - s.area.min_x());
    r.entry = Pose4::make(s.area.min_x(), s.area.min_y(), s.coverage_altitude, psi);
    r.entry_source = "area_corner";
  }
  r.drop_plan = plan_drop_tour(r.drops, s.carrier, *r.entry, s.area);
}

inline void round_trajectory(DescentTrajectory& t) {
  for (auto& s : t.samples) {
    s.t = r9(s.t);
    s.pose = Pose4{r9(s.pose.x), r9(s.pose.y), r9(s.pose.z), r9(s.pose.psi)};
    s.roll = r9(s.roll);
    s.pitch = r9(s.pitch);
  }
  t.touchdown = t.samples.back().pose.xy();
  t.touchdown_time = t.samples.back().t;
}

inline void run_descents(RunReport& r) {
  const Scenario& s = r.scenario;
  CoverageGrid total(s.area, s.grid_resolution());
  for (const auto& d : r.drop_plan->drop_points) {
    std::optional<SpiralParams> spiral;
    if (d.agent_kind == AgentKind::MAV) {
      spiral = s.spiral;
      if (s.omega_from_heuristic) spiral->omega = omega_heuristic(d.cell.area, d.altitude);
    }
    DescentTrajectory traj = simulate_descent(d, spiral, s.descent);
    round_trajectory(traj);
    total.merge(accumulate_descent_coverage(traj, s.camera, CoverageGrid(s.area, s.grid_resolution()), s.z_cutoff));
    r.trajectories.push_back(std::move(traj));
    r.trajectory_kinds.push_back(d.agent_kind);
    r.trajectory_omegas.push_back(spiral ? std::optional<double>(spiral->omega) : std::nullopt);
  }
  r.coverage.descent = round_fraction(total);
  r.descent_grid = std::move(total);
}

inline void run_mgv(RunReport& r) {
  const Scenario& s = r.scenario;
  if (s.roster.mgv == 0) return;
  MgvOutcome m;
  std::vector<Point2> starts;
  for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
    if (r.trajectory_kinds[i] != AgentKind::MGV) continue;
    m.agent_ids.push_back(r.trajectories[i].agent_id);
    m.landing.push_back(Pose4::make(r.trajectories[i].touchdown.x, r.trajectories[i].touchdown.y, 0.0,
                                    s.descent.heading));
    starts.push_back(r.trajectories[i].touchdown);
  }
  m.targets = communication_targets(s.area, starts.size(), s.seed);
  if (s.reference) {
    for (const auto& t : m.targets) m.targets_wgs84.push_back(enu_to_wgs84({t.x, t.y, 0.0}, *s.reference));
  }
  m.assignment = optimal_assignment(starts, m.targets);
  m.paths = drive_paths(m.assignment, m.landing, m.targets, s.r_min_car);
  std::vector<Point2> final_positions;
  for (const auto& p : m.paths) final_positions.push_back(integrate_path(p).xy());
  m.network = connectivity_check(final_positions, s.effective_comm_range());
  r.mgv = std::move(m);
}

}  // namespace detail

/// Runs the phases in order up to and including `last`. Errors surface as
/// PhaseError naming the phase; completed phases stay in the report.
inline void execute_phases(RunReport& r, Phase last = Phase::Evaluation) {
  using clock = std::chrono::steady_clock;
  const std::pair<Phase, void (*)(RunReport&)> steps[] = {
      {Phase::RapidCoverage, detail::run_rapid_coverage}, {Phase::DropPoints, detail::run_drop_points},
      {Phase::DropTour, detail::run_drop_tour},           {Phase::Descents, detail::run_descents},
      {Phase::Mgv, detail::run_mgv},                      {Phase::Evaluation, [](RunReport&) {}},
  };
  for (const auto& [phase, fn] : steps) {
    if (r.has(phase)) continue;
    const auto t0 = clock::now();
    try {
      fn(r);
    } catch (const PhaseError&) {
      throw;
    } catch (const Error& e) {
      throw PhaseError(phase, e);
    }
    r.timings.emplace_back(phase_name(phase), std::chrono::duration<double>(clock::now() - t0).count());
    r.completed.push_back(phase);
    if (phase == last) break;
  }
}

// ---------------------------------------------------------------------------
// Serialization

inline json pose_json(const Pose4& p) { return {{"x", r9(p.x)}, {"y", r9(p.y)}, {"z", r9(p.z)}, {"psi", r9(p.psi)}}; }

inline json path_json(const DubinsPath& p) {
  json segs = json::array();
  for (const auto& s : p.segments) {
    segs.push_back({{"kind", segment_kind_name(s.kind)},
                    {"length", r9(s.length)},
                    {"flight_path_angle", r9(s.flight_path_angle)}});
  }
  return {{"word", word_name(p.word)},
          {"altitude_case", altitude_case_name(p.altitude_case)},
          {"length", r9(p.total_length)},
          {"radius", r9(p.radius)},
          {"helix_turns", p.helix_turns},
          {"medium_fallback", p.medium_fallback},
          {"segments", segs}};
}

inline json drop_json(const DropPoint& d) {
  json cell = json::array();
  for (const auto& v : d.cell.polygon) cell.push_back({r9(v.x), r9(v.y)});
  return {{"agent_id", d.agent_id},
          {"agent_kind", agent_kind_name(d.agent_kind)},
          {"x", r9(d.position.x)},
          {"y", r9(d.position.y)},
          {"altitude", r9(d.altitude)},
          {"required_altitude", r9(d.required_altitude)},
          {"deficient", d.deficient},
          {"cell_index", d.cell_index},
          {"cell_area", r9(d.cell.area)},
          {"cell", cell}};
}

inline json plan_json(const MissionPlan& p) {
  json wps = json::array(), legs = json::array(), drops = json::array();
  for (const auto& w : p.waypoints) wps.push_back(pose_json(w));
  for (const auto& l : p.legs) legs.push_back(path_json(l));
  for (const auto& d : p.drop_points) drops.push_back(drop_json(d));
  return {{"kind", plan_kind_name(p.kind)},
          {"closed", p.closed},
          {"total_length", r9(p.total_length)},
          {"total_duration", r9(p.total_duration)},
          {"waypoints", wps},
          {"legs", legs},
          {"drop_points", drops}};
}

inline std::string trajectory_file(const DescentTrajectory& t) { return "trajectories/" + t.agent_id + ".csv"; }

inline json mgv_json(const RunReport& r) {
  const MgvOutcome& m = *r.mgv;
  json agents = json::array();
  for (std::size_t k = 0; k < m.assignment.pairs.size(); ++k) {
    const auto [i, j] = m.assignment.pairs[k];
    json a = {{"agent_id", m.agent_ids[i]},
              {"landing", pose_json(m.landing[i])},
              {"target_index", j},
              {"target", {r9(m.targets[j].x), r9(m.targets[j].y)}},
              {"distance", r9(distance(m.landing[i].xy(), m.targets[j]))},
              {"drive_path", path_json(m.paths[k])}};
    if (!m.targets_wgs84.empty()) {
      const auto& g = m.targets_wgs84[j];
      a["target_wgs84"] = {{"latitude_deg", r9(g.latitude * 180.0 / std::numbers::pi)},
                           {"longitude_deg", r9(g.longitude * 180.0 / std::numbers::pi)},
                           {"altitude", r9(g.altitude)}};
    }
    agents.push_back(a);
  }
  double drive = 0.0;
  for (const auto& p : m.paths) drive += p.total_length;
  return {{"method", m.assignment.used_fallback ? "hungarian" : "enumeration"},
          {"total_distance", r9(m.assignment.total_distance)},
          {"total_drive_length", r9(drive)},
          {"agents", agents},
          {"network",
           {{"comm_range", r9(m.network.comm_range)},
            {"connected", m.network.connected},
            {"components", m.network.components}}}};
}

inline json optional_number(const std::optional<double>& v) { return v ? json(r9(*v)) : json(nullptr); }

/// Deterministic summary: no wall-clock values (those go to timings.json).
inline json report_json(const RunReport& r) {
  const Scenario& s = r.scenario;
  const CoverageGrid probe(s.area, s.grid_resolution());
  json j = {
      {"scenario", s.name},
      {"seed", s.seed},
      {"area", {{"origin", {r9(s.area.origin.x), r9(s.area.origin.y)}}, {"d_x", r9(s.area.d_x)}, {"d_y", r9(s.area.d_y)}}},
      {"camera", {{"fov", r9(s.camera.fov)}, {"footprint", s.camera.footprint == FootprintShape::Disk ? "disk" : "square"}}},
      {"grid", {{"resolution", r9(s.grid_resolution())}, {"nx", probe.nx()}, {"ny", probe.ny()}}},
      {"z_cutoff", r9(s.z_cutoff)},
      {"roster", {{"mav", s.roster.mav}, {"mgv", s.roster.mgv}, {"static_sensor", s.roster.static_sensor}}},
      {"phases_completed", json::array()},
      {"coverage",
       {{"rapid", optional_number(r.coverage.rapid)},
        {"first_sample", optional_number(r.coverage.first_sample)},
        {"descent", optional_number(r.coverage.descent)}}},
  };
  for (Phase p : r.completed) j["phases_completed"].push_back(phase_name(p));
  if (r.coverage_plan) {
    j["rapid_coverage"] = {{"viewpoints", r.coverage_plan->viewpoints.size()},
                           {"total_length", r9(r.coverage_plan->total_length)},
                           {"total_duration", r9(r.coverage_plan->total_duration)},
                           {"file", "plan_coverage.json"}};
  }
  if (r.has(Phase::DropPoints)) {
    std::size_t deficient = 0;
    for (const auto& d : r.drops) deficient += d.deficient ? 1 : 0;
    j["drop_points"] = {{"count", r.drops.size()}, {"deficient", deficient}};
  }
  if (r.drop_plan) {
    j["drop_tour"] = {{"entry", pose_json(*r.entry)},
                      {"entry_source", r.entry_source},
                      {"total_length", r9(r.drop_plan->total_length)},
                      {"total_duration", r9(r.drop_plan->total_duration)},
                      {"file", "plan_drop.json"}};
  }
  if (r.has(Phase::Descents)) {
    json trajs = json::array();
    for (std::size_t i = 0; i < r.trajectories.size(); ++i) {
      const auto& t = r.trajectories[i];
      trajs.push_back({{"agent_id", t.agent_id},
                       {"agent_kind", agent_kind_name(r.trajectory_kinds[i])},
                       {"omega", optional_number(r.trajectory_omegas[i])},
                       {"touchdown", {r9(t.touchdown.x), r9(t.touchdown.y)}},
                       {"touchdown_time", r9(t.touchdown_time)},
                       {"samples", t.samples.size()},
                       {"file", trajectory_file(t)}});
    }
    j["trajectories"] = trajs;
  }
  if (r.mgv) {
    j["mgv"] = {{"file", "mgv_plan.json"},
                {"method", r.mgv->assignment.used_fallback ? "hungarian" : "enumeration"},
                {"total_distance", r9(r.mgv->assignment.total_distance)},
                {"network",
                 {{"comm_range", r9(r.mgv->network.comm_range)},
                  {"connected", r.mgv->network.connected},
                  {"components", r.mgv->network.components}}}};
  }
  j["artifacts"] = r.artifacts;
  return j;
}

}  // namespace airdrop
