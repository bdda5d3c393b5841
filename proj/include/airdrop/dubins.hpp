#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "airdrop/error.hpp"
#include "airdrop/geometry.hpp"

namespace airdrop {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Angle wrapped to [0, 2π).
inline double wrap_two_pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// Signed smallest difference a - b in (-π, π].
inline double angle_diff(double a, double b) {
  double d = std::fmod(a - b, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  if (d > std::numbers::pi) d -= kTwoPi;
  return d;
}

struct Pose4 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double psi = 0.0;  // heading, radians in [0, 2π)

  static Pose4 make(double x, double y, double z, double psi) { return {x, y, z, wrap_two_pi(psi)}; }

  Point2 xy() const { return {x, y}; }

  friend bool operator==(const Pose4&, const Pose4&) = default;
};

struct VehicleLimits {
  double r_min = 1.0;
  double gamma_max = 0.2;
  double airspeed = 1.0;

  void validate() const {
    if (!(r_min > 0.0) || !std::isfinite(r_min)) throw Error(ErrorCode::InvalidArgument, "r_min must be > 0");
    if (!(gamma_max > 0.0 && gamma_max < std::numbers::pi / 2.0)) {
      throw Error(ErrorCode::InvalidArgument, "gamma_max must lie in (0, pi/2)");
    }
    if (!(airspeed > 0.0) || !std::isfinite(airspeed)) throw Error(ErrorCode::InvalidArgument, "airspeed must be > 0");
  }
};

enum class SegmentKind { LeftArc, RightArc, Straight, HelixLeft, HelixRight };

inline std::string_view segment_kind_name(SegmentKind k) {
  switch (k) {
    case SegmentKind::LeftArc: return "LeftArc";
    case SegmentKind::RightArc: return "RightArc";
    case SegmentKind::Straight: return "Straight";
    case SegmentKind::HelixLeft: return "HelixLeft";
    case SegmentKind::HelixRight: return "HelixRight";
  }
  return "?";
}

inline int turn_sign(SegmentKind k) {
  switch (k) {
    case SegmentKind::LeftArc:
    case SegmentKind::HelixLeft: return 1;
    case SegmentKind::RightArc:
    case SegmentKind::HelixRight: return -1;
    case SegmentKind::Straight: return 0;
  }
  return 0;
}

struct DubinsSegment {
  SegmentKind kind = SegmentKind::Straight;
  double length = 0.0;             // 3D arc length, meters
  double flight_path_angle = 0.0;  // radians, positive when climbing

  double planar_length() const { return length * std::cos(flight_path_angle); }
};

enum class DubinsWord { LSL, RSR, LSR, RSL, RLR, LRL };
inline constexpr std::array<DubinsWord, 6> kAllWords = {DubinsWord::LSL, DubinsWord::RSR, DubinsWord::LSR,
                                                        DubinsWord::RSL, DubinsWord::RLR, DubinsWord::LRL};

inline std::string_view word_name(DubinsWord w) {
  static constexpr std::array<std::string_view, 6> names = {"LSL", "RSR", "LSR", "RSL", "RLR", "LRL"};
  return names[static_cast<int>(w)];
}

enum class AltitudeCase { Planar, Low, Medium, High };

inline std::string_view altitude_case_name(AltitudeCase c) {
  switch (c) {
    case AltitudeCase::Planar: return "Planar";
    case AltitudeCase::Low: return "Low";
    case AltitudeCase::Medium: return "Medium";
    case AltitudeCase::High: return "High";
  }
  return "?";
}

struct DubinsPath {
  Pose4 start;
  Pose4 end;
  std::vector<DubinsSegment> segments;
  double total_length = 0.0;
  AltitudeCase altitude_case = AltitudeCase::Planar;
  DubinsWord word = DubinsWord::LSL;
  double radius = 1.0;
  int helix_turns = 0;
  // Medium case only: true when no exact γ_max climb existed and a single
  // reduced-angle helix turn was used instead.
  bool medium_fallback = false;
};

namespace detail {

/// Wraps to [0, 2π) and snaps values within 1e-12 of 2π to zero so that
/// roundoff never turns an empty arc into a full circle.
inline double mod2pi_snap(double a) {
  const double r = wrap_two_pi(a);
  return (kTwoPi - r < 1e-12) ? 0.0 : r;
}

inline std::array<char, 3> word_letters(DubinsWord w) {
  const std::string_view n = word_name(w);
  return {n[0], n[1], n[2]};
}

inline SegmentKind letter_kind(char c) {
  return c == 'L' ? SegmentKind::LeftArc : (c == 'R' ? SegmentKind::RightArc : SegmentKind::Straight);
}

/// Normalized (unit radius) segment parameters of one word, or nothing if the
/// word is infeasible. alpha/beta are the headings relative to the baseline
/// and d the baseline length divided by the radius.
inline std::optional<std::array<double, 3>> word_params(DubinsWord w, double alpha, double beta, double d) {
  const double sa = std::sin(alpha), sb = std::sin(beta);
  const double ca = std::cos(alpha), cb = std::cos(beta);
  const double c_ab = std::cos(alpha - beta);
  switch (w) {
    case DubinsWord::LSL: {
      const double p2 = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sa - sb);
      if (p2 < 0.0) return std::nullopt;
      const double tmp = std::atan2(cb - ca, d + sa - sb);
      return std::array<double, 3>{mod2pi_snap(tmp - alpha), std::sqrt(p2), mod2pi_snap(beta - tmp)};
    }
    case DubinsWord::RSR: {
      const double p2 = 2.0 + d * d - 2.0 * c_ab + 2.0 * d * (sb - sa);
      if (p2 < 0.0) return std::nullopt;
      const double tmp = std::atan2(ca - cb, d - sa + sb);
      return std::array<double, 3>{mod2pi_snap(alpha - tmp), std::sqrt(p2), mod2pi_snap(tmp - beta)};
    }
    case DubinsWord::LSR: {
      const double p2 = -2.0 + d * d + 2.0 * c_ab + 2.0 * d * (sa + sb);
      if (p2 < 0.0) return std::nullopt;
      const double p = std::sqrt(p2);
      const double tmp = std::atan2(-ca - cb, d + sa + sb) - std::atan2(-2.0, p);
      return std::array<double, 3>{mod2pi_snap(tmp - alpha), p, mod2pi_snap(tmp - beta)};
    }
    case DubinsWord::RSL: {
      const double p2 = -2.0 + d * d + 2.0 * c_ab - 2.0 * d * (sa + sb);
      if (p2 < 0.0) return std::nullopt;
      const double p = std::sqrt(p2);
      const double tmp = std::atan2(ca + cb, d - sa - sb) - std::atan2(2.0, p);
      return std::array<double, 3>{mod2pi_snap(alpha - tmp), p, mod2pi_snap(beta - tmp)};
    }
    case DubinsWord::RLR: {
      const double tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sa - sb)) / 8.0;
      if (std::abs(tmp) > 1.0) return std::nullopt;
      const double p = mod2pi_snap(kTwoPi - std::acos(tmp));
      const double t = mod2pi_snap(alpha - std::atan2(ca - cb, d - sa + sb) + p / 2.0);
      return std::array<double, 3>{t, p, mod2pi_snap(alpha - beta - t + p)};
    }
    case DubinsWord::LRL: {
      const double tmp = (6.0 - d * d + 2.0 * c_ab + 2.0 * d * (sb - sa)) / 8.0;
      if (std::abs(tmp) > 1.0) return std::nullopt;
      const double p = mod2pi_snap(kTwoPi - std::acos(tmp));
      const double t = mod2pi_snap(-alpha + std::atan2(-ca + cb, d + sa - sb) + p / 2.0);
      return std::array<double, 3>{t, p, mod2pi_snap(beta - alpha - t + p)};
    }
  }
  return std::nullopt;
}

struct CarSolution {
  DubinsWord word = DubinsWord::LSL;
  std::array<double, 3> params{};  // normalized segment lengths
  double length = std::numeric_limits<double>::infinity();
};

/// Shortest of the six words; every word is evaluated, no pruning.
inline CarSolution solve_car(const Pose4& q0, const Pose4& qf, double r) {
  const double dx = qf.x - q0.x;
  const double dy = qf.y - q0.y;
  const double d = std::hypot(dx, dy) / r;
  const double theta = d > 0.0 ? wrap_two_pi(std::atan2(dy, dx)) : 0.0;
  const double alpha = wrap_two_pi(q0.psi - theta);
  const double beta = wrap_two_pi(qf.psi - theta);
  CarSolution best;
  for (DubinsWord w : kAllWords) {
    const auto prm = word_params(w, alpha, beta, d);
    if (!prm) continue;
    const double len = ((*prm)[0] + (*prm)[1] + (*prm)[2]) * r;
    if (len < best.length) {
      best.word = w;
      best.params = *prm;
      best.length = len;
    }
  }
  return best;
}

/// Pose after flying planar length `planar` of a segment kind at radius r.
inline Pose4 advance(const Pose4& q, SegmentKind kind, double planar, double r, double climb) {
  Pose4 out = q;
  out.z = q.z + climb;
  const int sgn = turn_sign(kind);
  if (sgn == 0) {
    out.x = q.x + planar * std::cos(q.psi);
    out.y = q.y + planar * std::sin(q.psi);
    return out;
  }
  const double dpsi = sgn * planar / r;
  const double psi1 = q.psi + dpsi;
  out.x = q.x + sgn * r * (std::sin(psi1) - std::sin(q.psi));
  out.y = q.y - sgn * r * (std::cos(psi1) - std::cos(q.psi));
  out.psi = wrap_two_pi(psi1);
  return out;
}

inline void push_segment(std::vector<DubinsSegment>& segs, SegmentKind kind, double planar, double gamma) {
  if (planar <= 1e-12) return;
  segs.push_back({kind, planar / std::cos(gamma), gamma});
}

/// Planar segments (kind, planar length) of a car solution.
inline std::vector<std::pair<SegmentKind, double>> car_planar_segments(const CarSolution& sol, double r) {
  std::vector<std::pair<SegmentKind, double>> out;
  const auto letters = word_letters(sol.word);
  for (int i = 0; i < 3; ++i) {
    const double planar = sol.params[i] * r;
    if (planar > 1e-12) out.emplace_back(letter_kind(letters[i]), planar);
  }
  return out;
}

}  // namespace detail

/// Pose reached by integrating every segment from path.start.
inline Pose4 integrate_path(const DubinsPath& path) {
  Pose4 q = path.start;
  for (const auto& s : path.segments) {
    q = detail::advance(q, s.kind, s.planar_length(), path.radius, s.length * std::sin(s.flight_path_angle));
  }
  return q;
}

/// Shortest planar Dubins car path; z components are copied through.
inline DubinsPath dubins_car_path(const Pose4& q0, const Pose4& qf, double r_min) {
  if (!(r_min > 0.0)) throw Error(ErrorCode::InvalidArgument, "r_min must be > 0");
  const detail::CarSolution sol = detail::solve_car(q0, qf, r_min);
  DubinsPath path;
  path.start = q0;
  path.end = qf;
  path.radius = r_min;
  path.word = sol.word;
  path.altitude_case = AltitudeCase::Planar;
  for (const auto& [kind, planar] : detail::car_planar_segments(sol, r_min)) {
    detail::push_segment(path.segments, kind, planar, 0.0);
  }
  for (const auto& s : path.segments) path.total_length += s.length;
  return path;
}

/// Length of the shortest planar Dubins car path.
inline double dubins_car_length(const Pose4& q0, const Pose4& qf, double r_min) {
  return detail::solve_car(q0, qf, r_min).length;
}

namespace detail {

/// Pose on the turning circle of q, `angle` radians of travel away from q.
/// direction +1 = left circle, -1 = right circle; negative angle flies backwards.
inline Pose4 along_circle(const Pose4& q, int direction, double angle, double r) {
  const SegmentKind kind = direction > 0 ? SegmentKind::LeftArc : SegmentKind::RightArc;
  if (angle >= 0.0) return advance(q, kind, angle * r, r, 0.0);
  // Flying backwards along a left circle is flying forwards along the same
  // circle with the heading reversed, then reversing back.
  Pose4 rev = q;
  rev.psi = wrap_two_pi(q.psi + std::numbers::pi);
  const SegmentKind mirrored = direction > 0 ? SegmentKind::RightArc : SegmentKind::LeftArc;
  Pose4 out = advance(rev, mirrored, -angle * r, r, 0.0);
  out.psi = wrap_two_pi(out.psi + std::numbers::pi);
  return out;
}

/// Planar path of exact length `target` (up to bisection precision, never
/// shorter), built from a car path plus one partial loop on the start or
/// terminal circle. Returns empty when no family brackets the target.
inline std::optional<std::vector<std::pair<SegmentKind, double>>> extended_planar_path(const Pose4& q0,
                                                                                       const Pose4& qf, double r,
                                                                                       DubinsWord car_word,
                                                                                       double target) {
  struct Family {
    bool terminal;
    int direction;
  };
  const auto letters = word_letters(car_word);
  const int last_dir = letters[2] == 'L' ? 1 : -1;
  const int first_dir = letters[0] == 'L' ? 1 : -1;
  const std::array<Family, 4> families = {Family{true, last_dir}, Family{true, -last_dir}, Family{false, first_dir},
                                          Family{false, -first_dir}};

  for (const Family& fam : families) {
    const SegmentKind loop_kind = fam.direction > 0 ? SegmentKind::LeftArc : SegmentKind::RightArc;
    auto length_at = [&](double phi) {
      if (fam.terminal) return dubins_car_length(q0, along_circle(qf, fam.direction, -phi, r), r) + r * phi;
      return r * phi + dubins_car_length(along_circle(q0, fam.direction, phi, r), qf, r);
    };
    constexpr int kSamples = 128;
    const double tol = 1e-9 * std::max(1.0, target);
    double prev_phi = 0.0;
    double prev_val = length_at(0.0);
    for (int i = 1; i <= kSamples; ++i) {
      const double phi = kTwoPi * i / kSamples;
      const double val = length_at(phi);
      if (prev_val < target && val >= target) {
        double lo = prev_phi, hi = phi, hi_val = val;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double mv = length_at(mid);
          if (mv >= target) {
            hi = mid;
            hi_val = mv;
          } else {
            lo = mid;
          }
        }
        if (hi_val - target <= tol) {
          std::vector<std::pair<SegmentKind, double>> segs;
          if (fam.terminal) {
            const Pose4 mid_pose = along_circle(qf, fam.direction, -hi, r);
            segs = car_planar_segments(solve_car(q0, mid_pose, r), r);
            segs.emplace_back(loop_kind, r * hi);
          } else {
            const Pose4 mid_pose = along_circle(q0, fam.direction, hi, r);
            segs.emplace_back(loop_kind, r * hi);
            for (auto& s : car_planar_segments(solve_car(mid_pose, qf, r), r)) segs.push_back(s);
          }
          return segs;
        }
      }
      prev_phi = phi;
      prev_val = val;
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Dubins Airplane path: the planar car path extended for climb according to
/// the low / medium / high altitude regimes, never steeper than gamma_max.
inline DubinsPath dubins_airplane_path(const Pose4& q0, const Pose4& qf, const VehicleLimits& limits) {
  limits.validate();
  const double r = limits.r_min;
  const detail::CarSolution sol = detail::solve_car(q0, qf, r);
  const double car_len = sol.length;
  const double dz = qf.z - q0.z;
  const double abs_dz = std::abs(dz);
  const double tan_g = std::tan(limits.gamma_max);
  const double sign = dz < 0.0 ? -1.0 : 1.0;

  DubinsPath path;
  path.start = q0;
  path.end = qf;
  path.radius = r;
  path.word = sol.word;

  std::vector<std::pair<SegmentKind, double>> planar = detail::car_planar_segments(sol, r);
  double planar_total = car_len;

  const auto letters = detail::word_letters(sol.word);
  const SegmentKind helix_kind = letters[2] == 'L' ? SegmentKind::HelixLeft : SegmentKind::HelixRight;

  auto add_helix = [&](int k) {
    path.helix_turns = k;
    planar.emplace_back(helix_kind, kTwoPi * r * k);
    planar_total = car_len + kTwoPi * r * k;
  };

  if (abs_dz <= car_len * tan_g * (1.0 + 1e-12)) {
    path.altitude_case = AltitudeCase::Low;
  } else if (abs_dz > (car_len + kTwoPi * r) * tan_g) {
    path.altitude_case = AltitudeCase::High;
    int k = static_cast<int>(std::ceil((abs_dz / tan_g - car_len) / (kTwoPi * r)));
    k = std::max(k, 1);
    while (abs_dz > (car_len + kTwoPi * r * k) * tan_g) ++k;
    while (k > 1 && abs_dz <= (car_len + kTwoPi * r * (k - 1)) * tan_g) --k;
    add_helix(k);
  } else {
    path.altitude_case = AltitudeCase::Medium;
    const double target = abs_dz / tan_g;
    if (auto ext = detail::extended_planar_path(q0, qf, r, sol.word, target)) {
      planar = std::move(*ext);
      planar_total = 0.0;
      for (const auto& seg : planar) planar_total += seg.second;
    } else {
      path.medium_fallback = true;
      add_helix(1);
    }
  }

  const double gamma = planar_total > 0.0 ? sign * std::atan(abs_dz / planar_total) : 0.0;
  for (const auto& [kind, len] : planar) detail::push_segment(path.segments, kind, len, gamma);
  for (const auto& s : path.segments) path.total_length += s.length;
  return path;
}

/// Pose at 3D arc length s along the path (clamped to [0, total_length]).
inline Pose4 pose_at(const DubinsPath& path, double s) {
  Pose4 q = path.start;
  if (s <= 0.0) return q;
  for (const auto& seg : path.segments) {
    const double c = std::cos(seg.flight_path_angle);
    const double sn = std::sin(seg.flight_path_angle);
    if (s <= seg.length) return detail::advance(q, seg.kind, s * c, path.radius, s * sn);
    q = detail::advance(q, seg.kind, seg.length * c, path.radius, seg.length * sn);
    s -= seg.length;
  }
  return q;
}

/// Poses every ds of 3D arc length, both endpoints included.
inline std::vector<Pose4> sample_path(const DubinsPath& path, double ds) {
  if (!(ds > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample spacing must be > 0");
  std::vector<Pose4> out;
  out.push_back(path.start);
  const double total = path.total_length;
  const auto steps = static_cast<long>(std::ceil(total / ds - 1e-9));
  for (long k = 1; k < steps; ++k) out.push_back(pose_at(path, static_cast<double>(k) * ds));
  if (total > 0.0) out.push_back(path.end);
  return out;
}

inline double path_duration(const DubinsPath& path, const VehicleLimits& limits) {
  if (!(limits.airspeed > 0.0)) throw Error(ErrorCode::InvalidArgument, "airspeed must be > 0");
  return path.total_length / limits.airspeed;
}

}  // namespace airdrop
