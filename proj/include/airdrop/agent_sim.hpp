#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "airdrop/dubins.hpp"
#include "airdrop/error.hpp"
#include "airdrop/mission_planner.hpp"
#include "airdrop/sensing.hpp"

namespace airdrop {

enum class AmplitudeProfile { Constant, LinearRamp };

struct SpiralParams {
  double amplitude = 0.35;  // peak tilt A, radians
  double omega = 1.0;       // rad/s
  AmplitudeProfile profile = AmplitudeProfile::Constant;
  double t_ramp = 1.0;  // seconds, LinearRamp only

  void validate() const {
    if (!(amplitude >= 0.0 && amplitude < std::numbers::pi / 2.0)) {
      throw Error(ErrorCode::InvalidArgument, "spiral amplitude must lie in [0, pi/2)");
    }
    if (!(omega > 0.0) || !std::isfinite(omega)) throw Error(ErrorCode::InvalidArgument, "spiral omega must be > 0");
    if (profile == AmplitudeProfile::LinearRamp && !(t_ramp > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "spiral t_ramp must be > 0");
    }
  }

  double amplitude_at(double t) const {
    if (profile == AmplitudeProfile::Constant) return amplitude;
    return amplitude * std::min(t / t_ramp, 1.0);
  }
};

struct DescentParams {
  double g = 9.80665;
  double terminal_velocity = 15.0;
  double planar_gain = 1.0;
  double heading = 0.0;
  double dt = 0.02;

  void validate() const {
    if (!(g > 0.0)) throw Error(ErrorCode::InvalidArgument, "g must be > 0");
    if (!(terminal_velocity > 0.0)) throw Error(ErrorCode::InvalidArgument, "terminal_velocity must be > 0");
    if (!(planar_gain >= 0.0)) throw Error(ErrorCode::InvalidArgument, "planar_gain must be >= 0");
    if (!(dt > 0.0 && dt <= 0.05)) throw Error(ErrorCode::InvalidArgument, "dt must lie in (0, 0.05]");
  }
};

struct DescentSample {
  double t = 0.0;
  Pose4 pose;
  double roll = 0.0;
  double pitch = 0.0;
};

struct DescentTrajectory {
  std::string agent_id;
  std::vector<DescentSample> samples;
  Point2 touchdown;
  double touchdown_time = 0.0;
};

/// Roll and pitch commands A(t) sin(wt), A(t) cos(wt).
inline std::pair<double, double> spiral_command(double t, const SpiralParams& p) {
  const double a = p.amplitude_at(t);
  return {a * std::sin(p.omega * t), a * std::cos(p.omega * t)};
}

/// w = 5.2 S_V / dz, clamped.
inline double omega_heuristic(double cell_area, double drop_altitude, double omega_min = 0.05,
                              double omega_max = 12.0) {
  if (!(cell_area > 0.0) || !(drop_altitude > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "omega heuristic needs positive cell area and altitude");
  }
  return std::clamp(5.2 * cell_area / drop_altitude, omega_min, omega_max);
}

/// Drag-limited fall: v_z = v_t tanh(g t / v_t).
inline double fall_speed(double t, const DescentParams& d) {
  return d.terminal_velocity * std::tanh(d.g * t / d.terminal_velocity);
}

/// Distance fallen after t seconds, (v_t^2 / g) ln cosh(g t / v_t).
inline double fall_distance(double t, const DescentParams& d) {
  const double u = d.g * t / d.terminal_velocity;
  const double log_cosh = u + std::log1p(std::exp(-2.0 * u)) - std::log(2.0);
  return d.terminal_velocity * d.terminal_velocity / d.g * log_cosh;
}

/// Time to fall `height`, inverting fall_distance.
inline double fall_time(double height, const DescentParams& d) {
  const double x = d.g * height / (d.terminal_velocity * d.terminal_velocity);
  // acosh(e^x) without overflowing e^x.
  const double acosh_ex = x + std::log1p(std::sqrt(-std::expm1(-2.0 * x)));
  return d.terminal_velocity / d.g * acosh_ex;
}

/// Fixed-step descent from the drop point to the ground. Altitude follows the
/// closed-form fall; planar motion is explicit Euler on the tilt-driven
/// acceleration with airflow damping (1 - 0.5 v_z / v_t) applied per second.
/// No spiral means a straight-down fall.
inline DescentTrajectory simulate_descent(const DropPoint& drop, const std::optional<SpiralParams>& spiral,
                                          const DescentParams& descent) {
  if (!(drop.altitude > 0.0) || !std::isfinite(drop.altitude)) {
    throw Error(ErrorCode::InvalidDrop, "drop altitude must be > 0");
  }
  descent.validate();
  if (spiral) spiral->validate();

  DescentTrajectory traj;
  traj.agent_id = drop.agent_id;
  const double t_end = fall_time(drop.altitude, descent);
  const double c = std::cos(descent.heading), s = std::sin(descent.heading);
  const double accel = descent.planar_gain * descent.g;

  Point2 p = drop.position;
  Point2 v{0.0, 0.0};
  double t = 0.0;
  auto command = [&](double time) {
    return spiral ? spiral_command(time, *spiral) : std::pair<double, double>{0.0, 0.0};
  };
  auto record = [&](double time, double z) {
    const auto [roll, pitch] = command(time);
    traj.samples.push_back({time, Pose4::make(p.x, p.y, z, descent.heading), roll, pitch});
  };

  record(0.0, drop.altitude);
  for (std::size_t k = 1;; ++k) {
    const double t_next = std::min(static_cast<double>(k) * descent.dt, t_end);
    const double h = t_next - t;
    if (spiral) {
      const auto [roll, pitch] = command(t);
      const double bx = accel * std::tan(roll), by = accel * std::tan(pitch);
      const Point2 a{c * bx - s * by, s * bx + c * by};
      const double retain = std::pow(1.0 - 0.5 * fall_speed(t, descent) / descent.terminal_velocity, h);
      p = p + v * h;
      v = (v + a * h) * retain;
    }
    t = t_next;
    if (t >= t_end) {
      record(t_end, 0.0);
      break;
    }
    record(t, std::max(drop.altitude - fall_distance(t, descent), 0.0));
  }
  traj.touchdown = p;
  traj.touchdown_time = t_end;
  return traj;
}

/// Marks the nadir disk footprint at every sample above `z_cutoff`.
inline CoverageGrid accumulate_descent_coverage(const DescentTrajectory& traj, const CameraModel& camera,
                                                CoverageGrid grid, double z_cutoff = 2.0) {
  for (const auto& s : traj.samples) {
    if (s.pose.z > z_cutoff) grid.mark_disk(s.pose.xy(), footprint_halfwidth(s.pose.z, camera.fov));
  }
  return grid;
}

inline void write_trajectory_csv(std::ostream& os, const DescentTrajectory& traj) {
  os << "t,x,y,z,psi,roll,pitch\n";
  char buf[256];
  for (const auto& s : traj.samples) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", s.t, s.pose.x, s.pose.y, s.pose.z,
                  s.pose.psi, s.roll, s.pitch);
    os << buf;
  }
}

}  // namespace airdrop
