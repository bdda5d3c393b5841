#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "airdrop/dubins.hpp"
#include "airdrop/error.hpp"
#include "airdrop/geometry.hpp"
#include "airdrop/sensing.hpp"
#include "airdrop/tsp.hpp"

namespace airdrop {

enum class AgentKind { MAV, MGV, StaticSensor };

inline std::string_view agent_kind_name(AgentKind k) {
  switch (k) {
    case AgentKind::MAV: return "MAV";
    case AgentKind::MGV: return "MGV";
    case AgentKind::StaticSensor: return "StaticSensor";
  }
  return "?";
}

struct Roster {
  std::size_t mav = 0;
  std::size_t mgv = 0;
  std::size_t static_sensor = 0;

  std::size_t total() const { return mav + mgv + static_sensor; }
};

struct DropPoint {
  Point2 position;
  double altitude = 0.0;       // release altitude above ground
  double required_altitude = 0.0;  // smallest altitude whose cone covers the cell
  VoronoiCell cell;
  std::size_t cell_index = 0;
  std::string agent_id;
  AgentKind agent_kind = AgentKind::StaticSensor;
  bool deficient = false;  // clamped to the ceiling, cone no longer covers the cell
};

enum class PlanKind { RapidCoverage, DropTour };

inline std::string_view plan_kind_name(PlanKind k) {
  return k == PlanKind::RapidCoverage ? "RapidCoverage" : "DropTour";
}

struct MissionPlan {
  PlanKind kind = PlanKind::RapidCoverage;
  std::vector<Pose4> waypoints;
  std::vector<DubinsPath> legs;          // legs[i] joins waypoints[i] and waypoints[i + 1]
  std::vector<DropPoint> drop_points;    // in visiting order; empty for rapid coverage
  std::vector<Point2> viewpoints;        // rapid coverage sites in Lloyd order
  double total_length = 0.0;
  double total_duration = 0.0;
  bool closed = false;
};

struct PlannerOptions {
  LloydOptions lloyd;
  HeadingPolicy heading = HeadingPolicy::NextNearest;
  bool closed_tour = true;  // rapid coverage returns to its first viewpoint
  KOptOptions kopt;
  std::size_t tour_starts = 8;  // nearest-neighbor starts tried before k-opt
  PerturbOptions perturb;
};

namespace detail {

inline Tour improved_tour(const CostMatrix& costs, bool closed, std::size_t anchor, const PlannerOptions& opt) {
  const std::size_t n = costs.size();
  Tour best;
  best.total_cost = std::numeric_limits<double>::infinity();
  const std::size_t starts = closed ? std::min(n, std::max<std::size_t>(1, opt.tour_starts)) : 1;
  for (std::size_t k = 0; k < starts; ++k) {
    const std::size_t s = (anchor + k) % n;
    Tour t = k_opt_improve(nearest_neighbor_tour(costs, s, closed), costs, opt.kopt);
    if (closed) {
      std::rotate(t.order.begin(), std::find(t.order.begin(), t.order.end(), anchor), t.order.end());
      t.total_cost = tour_cost(t.order, costs, closed);
    }
    if (t.total_cost < best.total_cost) best = std::move(t);
  }
  return perturb_improve(std::move(best), costs, opt.kopt, opt.perturb);
}

inline void finish_plan(MissionPlan& plan, const VehicleLimits& limits) {
  plan.legs.clear();
  plan.total_length = 0.0;
  for (std::size_t i = 0; i + 1 < plan.waypoints.size(); ++i) {
    plan.legs.push_back(dubins_airplane_path(plan.waypoints[i], plan.waypoints[i + 1], limits));
    plan.total_length += plan.legs.back().total_length;
  }
  plan.total_duration = plan.total_length / limits.airspeed;
}

}  // namespace detail

/// Viewpoints at altitude z_c for full nadir coverage, relaxed with Lloyd and
/// ordered by an ATSP tour over Dubins Airplane lengths. `tour_override`
/// replaces the in-repo solver with an externally computed visiting order.
inline MissionPlan plan_rapid_coverage(const AreaOfInterest& area, double z_c, const CameraModel& camera,
                                       const VehicleLimits& limits, std::uint64_t seed,
                                       const PlannerOptions& options = {},
                                       const std::optional<std::vector<std::size_t>>& tour_override = std::nullopt) {
  camera.validate();
  limits.validate();
  const std::size_t n = required_viewpoints(area, z_c, camera.fov);
  MissionPlan plan;
  plan.kind = PlanKind::RapidCoverage;
  if (n == 1) {
    const Point2 c = area.center();
    plan.viewpoints = {c};
    const double psi = assign_headings(plan.viewpoints, options.heading, area)[0];
    plan.waypoints = {Pose4::make(c.x, c.y, z_c, psi)};
    return plan;
  }

  const LloydResult lloyd = lloyd_relax(n, area, options.lloyd, seed);
  plan.viewpoints = lloyd.partition.sites();
  const auto headings = assign_headings(plan.viewpoints, options.heading, area);
  std::vector<Pose4> poses;
  for (std::size_t i = 0; i < n; ++i) {
    poses.push_back(Pose4::make(plan.viewpoints[i].x, plan.viewpoints[i].y, z_c, headings[i]));
  }
  const CostMatrix costs = dubins_cost_matrix(poses, limits);
  Tour tour = tour_override ? make_tour(*tour_override, costs, options.closed_tour)
                            : detail::improved_tour(costs, options.closed_tour, 0, options);

  for (std::size_t idx : tour.order) plan.waypoints.push_back(poses[idx]);
  if (options.closed_tour) plan.waypoints.push_back(poses[tour.order.front()]);
  plan.closed = options.closed_tour;
  detail::finish_plan(plan, limits);
  return plan;
}

/// Cost matrix the rapid-coverage planner solves, for export to external solvers.
inline CostMatrix rapid_coverage_cost_matrix(const AreaOfInterest& area, double z_c, const CameraModel& camera,
                                             const VehicleLimits& limits, std::uint64_t seed,
                                             const PlannerOptions& options = {}) {
  const std::size_t n = required_viewpoints(area, z_c, camera.fov);
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "area needs a single viewpoint; nothing to solve");
  const auto sites = lloyd_relax(n, area, options.lloyd, seed).partition.sites();
  const auto headings = assign_headings(sites, options.heading, area);
  std::vector<Pose4> poses;
  for (std::size_t i = 0; i < n; ++i) poses.push_back(Pose4::make(sites[i].x, sites[i].y, z_c, headings[i]));
  return dubins_cost_matrix(poses, limits);
}

/// Drop points on a Lloyd-relaxed partition. Each release altitude is the
/// lowest one whose camera cone covers the whole Voronoi cell, clamped to
/// [z_floor, z_ceiling]; ceiling clamps are flagged deficient.
inline std::vector<DropPoint> plan_drop_points(const AreaOfInterest& area, std::size_t n_agents,
                                               const CameraModel& camera, double z_floor, double z_ceiling,
                                               std::uint64_t seed, const LloydOptions& lloyd = {}) {
  camera.validate();
  if (n_agents < 1) throw Error(ErrorCode::InvalidArgument, "need at least one agent to drop");
  if (!(z_floor > 0.0) || !(z_floor < z_ceiling)) {
    throw Error(ErrorCode::InvalidArgument, "need 0 < z_floor < z_ceiling");
  }
  const LloydResult res = lloyd_relax(n_agents, area, lloyd, seed);
  const auto& cells = res.partition.cells;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      if (distance(cells[i].site, cells[j].site) < 1e-6) {
        throw Error(ErrorCode::DegenerateSites, "drop sites collapsed; too many agents for the area");
      }
    }
  }
  const double tan_half = std::tan(0.5 * camera.fov);
  std::vector<DropPoint> drops;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    DropPoint d;
    d.position = cells[i].site;
    d.cell = cells[i];
    d.cell_index = i;
    double reach = 0.0;
    for (const Point2& v : cells[i].polygon) reach = std::max(reach, distance(v, d.position));
    d.required_altitude = reach / tan_half;
    d.altitude = std::clamp(d.required_altitude, z_floor, z_ceiling);
    d.deficient = d.required_altitude > z_ceiling;
    drops.push_back(std::move(d));
  }
  return drops;
}

/// Hands agents to drop points in cell order, cycling MAV, MGV, static sensor
/// and skipping kinds that have run out.
inline void assign_roster(std::vector<DropPoint>& drops, const Roster& roster) {
  if (roster.total() != drops.size()) {
    throw Error(ErrorCode::InvalidArgument, "roster size must equal the number of drop points");
  }
  std::array<std::size_t, 3> left = {roster.mav, roster.mgv, roster.static_sensor};
  std::array<std::size_t, 3> used = {0, 0, 0};
  constexpr std::array<AgentKind, 3> kinds = {AgentKind::MAV, AgentKind::MGV, AgentKind::StaticSensor};
  constexpr std::array<const char*, 3> prefix = {"mav-", "mgv-", "sensor-"};
  std::size_t k = 0;
  for (auto& d : drops) {
    while (left[k % 3] == 0) ++k;
    const std::size_t kind = k % 3;
    d.agent_kind = kinds[kind];
    d.agent_id = prefix[kind] + std::to_string(used[kind]++);
    --left[kind];
    ++k;
  }
}

/// Open drop tour from `entry` over every drop point at its release altitude.
inline MissionPlan plan_drop_tour(std::vector<DropPoint> drops, const VehicleLimits& limits, const Pose4& entry,
                                  const AreaOfInterest& area, const PlannerOptions& options = {}) {
  limits.validate();
  if (drops.empty()) throw Error(ErrorCode::InvalidArgument, "drop tour needs at least one drop point");
  MissionPlan plan;
  plan.kind = PlanKind::DropTour;
  plan.closed = false;

  std::vector<Point2> xy;
  for (const auto& d : drops) xy.push_back(d.position);
  std::size_t first = 0;
  for (std::size_t i = 1; i < xy.size(); ++i) {
    if (norm2(xy[i] - entry.xy()) < norm2(xy[first] - entry.xy())) first = i;
  }
  const auto headings = assign_headings(xy, options.heading, area, first);

  std::vector<Pose4> nodes{entry};
  for (std::size_t i = 0; i < drops.size(); ++i) {
    nodes.push_back(Pose4::make(xy[i].x, xy[i].y, drops[i].altitude, headings[i]));
  }
  std::vector<std::size_t> order{0};
  if (drops.size() == 1) {
    order.push_back(1);
  } else {
    const CostMatrix costs = dubins_cost_matrix(nodes, limits);
    order = detail::improved_tour(costs, false, 0, options).order;
  }
  for (std::size_t idx : order) {
    plan.waypoints.push_back(nodes[idx]);
    if (idx > 0) plan.drop_points.push_back(drops[idx - 1]);
  }
  detail::finish_plan(plan, limits);
  return plan;
}

/// Coverage of the square (or disk) footprints at every plan waypoint.
inline CoverageGrid plan_footprint_grid(const MissionPlan& plan, const AreaOfInterest& area,
                                        const CameraModel& camera, double resolution) {
  CoverageGrid grid(area, resolution);
  for (const auto& w : plan.waypoints) grid.mark_footprint(w, camera);
  return grid;
}

/// Union of first-sample drop footprints (disk of radius altitude * tan(fov/2)).
inline CoverageGrid drop_footprint_grid(const std::vector<DropPoint>& drops, const AreaOfInterest& area,
                                        const CameraModel& camera, double resolution) {
  CoverageGrid grid(area, resolution);
  for (const auto& d : drops) grid.mark_disk(d.position, footprint_halfwidth(d.altitude, camera.fov));
  return grid;
}

}  // namespace airdrop
