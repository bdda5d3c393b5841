#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "airdrop/agent_sim.hpp"
#include "airdrop/dubins.hpp"
#include "airdrop/error.hpp"
#include "airdrop/geometry.hpp"
#include "airdrop/mgv_planner.hpp"
#include "airdrop/mission_planner.hpp"
#include "airdrop/sensing.hpp"
#include "json.hpp"

namespace airdrop {

using json = nlohmann::json;

struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  AreaOfInterest area;
  std::optional<GeodeticCoord> reference;  // radians; the file holds degrees
  CameraModel camera;
  VehicleLimits carrier{50.0, 0.2, 18.0};
  bool rapid_coverage = true;
  double coverage_altitude = 100.0;
  double z_floor = 20.0;
  double z_ceiling = 1000.0;
  std::optional<Pose4> entry;  // default: end of the coverage tour
  Roster roster;
  SpiralParams spiral;
  bool omega_from_heuristic = true;
  DescentParams descent;
  double z_cutoff = 2.0;
  double r_min_car = 5.0;
  std::optional<double> comm_range;
  std::optional<double> resolution;

  double grid_resolution() const { return resolution ? *resolution : CoverageGrid::default_resolution(area); }

  double effective_comm_range() const {
    if (comm_range) return *comm_range;
    return 1.2 * std::sqrt(area.area() / static_cast<double>(std::max<std::size_t>(1, roster.mgv)));
  }
};

namespace detail {

inline std::string field_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

[[noreturn]] inline void config_fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, path + ": " + what);
}

inline void check_keys(const json& obj, const std::string& base, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) config_fail(field_path(base, it.key()), "unknown field");
  }
}

inline const json* find_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline const json& section(const json& obj, const std::string& base, const char* key) {
  static const json empty = json::object();
  const json* v = find_field(obj, key);
  if (!v) return empty;
  if (!v->is_object()) config_fail(field_path(base, key), "must be an object");
  return *v;
}

inline std::optional<double> opt_number(const json& obj, const std::string& base, const char* key) {
  const json* v = find_field(obj, key);
  if (!v) return std::nullopt;
  if (!v->is_number()) config_fail(field_path(base, key), "must be a number");
  const double x = v->get<double>();
  if (!std::isfinite(x)) config_fail(field_path(base, key), "must be finite");
  return x;
}

inline double number(const json& obj, const std::string& base, const char* key, std::optional<double> fallback) {
  const auto v = opt_number(obj, base, key);
  if (v) return *v;
  if (!fallback) config_fail(field_path(base, key), "required");
  return *fallback;
}

inline std::size_t count(const json& obj, const std::string& base, const char* key, std::size_t fallback) {
  const json* v = find_field(obj, key);
  if (!v) return fallback;
  if (!v->is_number_integer() || v->get<long long>() < 0) {
    config_fail(field_path(base, key), "must be a non-negative integer");
  }
  return v->get<std::size_t>();
}

inline void require(bool ok, const std::string& base, const char* key, const char* what) {
  if (!ok) config_fail(field_path(base, key), what);
}

}  // namespace detail

/// Builds a validated scenario from parsed JSON. Violations name the field path.
inline Scenario scenario_from_json(const json& j) {
  using namespace detail;
  if (!j.is_object()) config_fail("(root)", "must be an object");
  check_keys(j, "", {"name", "seed", "area", "reference", "camera", "carrier", "coverage", "drop", "roster", "mav",
                     "descent", "mgv", "grid"});
  Scenario s;
  if (const json* v = find_field(j, "name")) {
    if (!v->is_string()) config_fail("name", "must be a string");
    s.name = v->get<std::string>();
  }
  if (const json* v = find_field(j, "seed")) {
    if (!v->is_number_integer() || v->get<long long>() < 0) config_fail("seed", "must be a non-negative integer");
    s.seed = v->get<std::uint64_t>();
  }

  if (!find_field(j, "area")) config_fail("area", "required");
  const json& area = section(j, "", "area");
  check_keys(area, "area", {"origin", "d_x", "d_y"});
  Point2 origin{0.0, 0.0};
  if (const json* o = find_field(area, "origin")) {
    if (!o->is_array() || o->size() != 2 || !(*o)[0].is_number() || !(*o)[1].is_number()) {
      config_fail("area.origin", "must be [x, y]");
    }
    origin = {(*o)[0].get<double>(), (*o)[1].get<double>()};
  }
  const double d_x = number(area, "area", "d_x", std::nullopt);
  const double d_y = number(area, "area", "d_y", std::nullopt);
  require(d_x > 0.0, "area", "d_x", "must be > 0");
  require(d_y > 0.0, "area", "d_y", "must be > 0");
  s.area = AreaOfInterest::make(origin, d_x, d_y);

  if (find_field(j, "reference")) {
    const json& r = section(j, "", "reference");
    check_keys(r, "reference", {"latitude_deg", "longitude_deg", "altitude"});
    const double lat = number(r, "reference", "latitude_deg", std::nullopt);
    const double lon = number(r, "reference", "longitude_deg", std::nullopt);
    require(std::abs(lat) <= 90.0, "reference", "latitude_deg", "must lie in [-90, 90]");
    s.reference = GeodeticCoord{lat * std::numbers::pi / 180.0, lon * std::numbers::pi / 180.0,
                                number(r, "reference", "altitude", 0.0)};
  }

  const json& cam = section(j, "", "camera");
  check_keys(cam, "camera", {"fov", "footprint"});
  s.camera.fov = number(cam, "camera", "fov", s.camera.fov);
  require(s.camera.fov > 0.0 && s.camera.fov < std::numbers::pi, "camera", "fov", "must lie in (0, pi)");
  if (const json* f = find_field(cam, "footprint")) {
    const std::string name = f->is_string() ? f->get<std::string>() : "";
    if (name == "square") {
      s.camera.footprint = FootprintShape::Square;
    } else if (name == "disk") {
      s.camera.footprint = FootprintShape::Disk;
    } else {
      config_fail("camera.footprint", "must be \"square\" or \"disk\"");
    }
  }

  const json& car = section(j, "", "carrier");
  check_keys(car, "carrier", {"r_min", "gamma_max", "airspeed"});
  s.carrier.r_min = number(car, "carrier", "r_min", s.carrier.r_min);
  s.carrier.gamma_max = number(car, "carrier", "gamma_max", s.carrier.gamma_max);
  s.carrier.airspeed = number(car, "carrier", "airspeed", s.carrier.airspeed);
  require(s.carrier.r_min > 0.0, "carrier", "r_min", "must be > 0");
  require(s.carrier.gamma_max > 0.0 && s.carrier.gamma_max < std::numbers::pi / 2.0, "carrier", "gamma_max",
          "must lie in (0, pi/2)");
  require(s.carrier.airspeed > 0.0, "carrier", "airspeed", "must be > 0");

  const json& cov = section(j, "", "coverage");
  check_keys(cov, "coverage", {"enabled", "altitude"});
  if (const json* e = find_field(cov, "enabled")) {
    if (!e->is_boolean()) config_fail("coverage.enabled", "must be a boolean");
    s.rapid_coverage = e->get<bool>();
  }
  s.coverage_altitude = number(cov, "coverage", "altitude", s.coverage_altitude);
  require(s.coverage_altitude > 0.0, "coverage", "altitude", "must be > 0");

  const json& drop = section(j, "", "drop");
  check_keys(drop, "drop", {"z_floor", "z_ceiling", "entry"});
  s.z_floor = number(drop, "drop", "z_floor", s.z_floor);
  s.z_ceiling = number(drop, "drop", "z_ceiling", s.z_ceiling);
  require(s.z_floor > 0.0, "drop", "z_floor", "must be > 0");
  require(s.z_ceiling > s.z_floor, "drop", "z_ceiling", "must be > drop.z_floor");
  if (find_field(drop, "entry")) {
    const json& e = section(drop, "drop", "entry");
    check_keys(e, "drop.entry", {"x", "y", "z", "psi"});
    s.entry = Pose4::make(number(e, "drop.entry", "x", std::nullopt), number(e, "drop.entry", "y", std::nullopt),
                          number(e, "drop.entry", "z", std::nullopt), number(e, "drop.entry", "psi", 0.0));
  }

  if (!find_field(j, "roster")) config_fail("roster", "required");
  const json& roster = section(j, "", "roster");
  check_keys(roster, "roster", {"mav", "mgv", "static_sensor"});
  s.roster.mav = count(roster, "roster", "mav", 0);
  s.roster.mgv = count(roster, "roster", "mgv", 0);
  s.roster.static_sensor = count(roster, "roster", "static_sensor", 0);
  if (s.roster.total() < 1) config_fail("roster", "needs at least one agent");

  const json& mav = section(j, "", "mav");
  check_keys(mav, "mav", {"amplitude", "omega", "profile", "t_ramp"});
  s.spiral.amplitude = number(mav, "mav", "amplitude", s.spiral.amplitude);
  require(s.spiral.amplitude >= 0.0 && s.spiral.amplitude < std::numbers::pi / 2.0, "mav", "amplitude",
          "must lie in [0, pi/2)");
  if (const auto w = opt_number(mav, "mav", "omega")) {
    require(*w > 0.0, "mav", "omega", "must be > 0");
    s.spiral.omega = *w;
    s.omega_from_heuristic = false;
  }
  if (const json* p = find_field(mav, "profile")) {
    const std::string name = p->is_string() ? p->get<std::string>() : "";
    if (name == "constant") {
      s.spiral.profile = AmplitudeProfile::Constant;
    } else if (name == "linear_ramp") {
      s.spiral.profile = AmplitudeProfile::LinearRamp;
    } else {
      config_fail("mav.profile", "must be \"constant\" or \"linear_ramp\"");
    }
  }
  s.spiral.t_ramp = number(mav, "mav", "t_ramp", s.spiral.t_ramp);
  require(s.spiral.t_ramp > 0.0, "mav", "t_ramp", "must be > 0");

  const json& des = section(j, "", "descent");
  check_keys(des, "descent", {"terminal_velocity", "planar_gain", "heading", "dt", "z_cutoff"});
  s.descent.terminal_velocity = number(des, "descent", "terminal_velocity", s.descent.terminal_velocity);
  s.descent.planar_gain = number(des, "descent", "planar_gain", s.descent.planar_gain);
  s.descent.heading = number(des, "descent", "heading", s.descent.heading);
  s.descent.dt = number(des, "descent", "dt", s.descent.dt);
  s.z_cutoff = number(des, "descent", "z_cutoff", s.z_cutoff);
  require(s.descent.terminal_velocity > 0.0, "descent", "terminal_velocity", "must be > 0");
  require(s.descent.planar_gain >= 0.0, "descent", "planar_gain", "must be >= 0");
  require(s.descent.dt > 0.0 && s.descent.dt <= 0.05, "descent", "dt", "must lie in (0, 0.05]");
  require(s.z_cutoff >= 0.0, "descent", "z_cutoff", "must be >= 0");

  const json& mgv = section(j, "", "mgv");
  check_keys(mgv, "mgv", {"r_min_car", "comm_range"});
  s.r_min_car = number(mgv, "mgv", "r_min_car", s.r_min_car);
  require(s.r_min_car > 0.0, "mgv", "r_min_car", "must be > 0");
  s.comm_range = opt_number(mgv, "mgv", "comm_range");
  if (s.comm_range) require(*s.comm_range > 0.0, "mgv", "comm_range", "must be > 0");

  const json& grid = section(j, "", "grid");
  check_keys(grid, "grid", {"resolution"});
  s.resolution = opt_number(grid, "grid", "resolution");
  if (s.resolution) require(*s.resolution > 0.0, "grid", "resolution", "must be > 0");
  return s;
}

/// Parses scenario text. Syntax errors carry line and column.
inline Scenario parse_scenario(const std::string& text, const std::string& origin = "<input>") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t k = 0; k < end; ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ParseError, origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                           ": invalid JSON");
  }
  return scenario_from_json(j);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

}  // namespace airdrop
