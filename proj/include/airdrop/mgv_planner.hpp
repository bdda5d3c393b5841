#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string_view>
#include <utility>
#include <vector>

#include "airdrop/dubins.hpp"
#include "airdrop/error.hpp"
#include "airdrop/geometry.hpp"

namespace airdrop {

/// Angles in radians, altitude in meters above the WGS84 ellipsoid.
struct GeodeticCoord {
  double latitude = 0.0;
  double longitude = 0.0;
  double altitude = 0.0;
};

namespace wgs84 {
inline constexpr double kA = 6378137.0;
inline constexpr double kF = 1.0 / 298.257223563;
inline constexpr double kE2 = kF * (2.0 - kF);
}  // namespace wgs84

inline Point3 geodetic_to_ecef(const GeodeticCoord& p) {
  const double sl = std::sin(p.latitude), cl = std::cos(p.latitude);
  const double n = wgs84::kA / std::sqrt(1.0 - wgs84::kE2 * sl * sl);
  return {(n + p.altitude) * cl * std::cos(p.longitude), (n + p.altitude) * cl * std::sin(p.longitude),
          (n * (1.0 - wgs84::kE2) + p.altitude) * sl};
}

/// Fixed-point iteration on latitude; converges to roundoff within a few
/// steps anywhere near the surface.
inline GeodeticCoord ecef_to_geodetic(const Point3& e) {
  const double p = std::hypot(e.x, e.y);
  GeodeticCoord g;
  g.longitude = std::atan2(e.y, e.x);
  double lat = std::atan2(e.z, p * (1.0 - wgs84::kE2));
  double h = 0.0;
  for (int k = 0; k < 50; ++k) {
    const double sl = std::sin(lat);
    const double n = wgs84::kA / std::sqrt(1.0 - wgs84::kE2 * sl * sl);
    h = p / std::cos(lat) - n;
    const double next = std::atan2(e.z, p * (1.0 - wgs84::kE2 * n / (n + h)));
    const bool done = std::abs(next - lat) < 1e-15;
    lat = next;
    if (done) break;
  }
  const double sl = std::sin(lat);
  const double n = wgs84::kA / std::sqrt(1.0 - wgs84::kE2 * sl * sl);
  g.latitude = lat;
  g.altitude = std::abs(lat) < 1.0 ? p / std::cos(lat) - n : e.z / sl - n * (1.0 - wgs84::kE2);
  return g;
}

/// East-north-up offset of `p` in the tangent frame at `ref`.
inline Point3 wgs84_to_enu(const GeodeticCoord& p, const GeodeticCoord& ref) {
  const Point3 a = geodetic_to_ecef(p), o = geodetic_to_ecef(ref);
  const double dx = a.x - o.x, dy = a.y - o.y, dz = a.z - o.z;
  const double sl = std::sin(ref.latitude), cl = std::cos(ref.latitude);
  const double so = std::sin(ref.longitude), co = std::cos(ref.longitude);
  return {-so * dx + co * dy, -sl * co * dx - sl * so * dy + cl * dz, cl * co * dx + cl * so * dy + sl * dz};
}

inline GeodeticCoord enu_to_wgs84(const Point3& enu, const GeodeticCoord& ref) {
  const Point3 o = geodetic_to_ecef(ref);
  const double sl = std::sin(ref.latitude), cl = std::cos(ref.latitude);
  const double so = std::sin(ref.longitude), co = std::cos(ref.longitude);
  const Point3 e{o.x - so * enu.x - sl * co * enu.y + cl * co * enu.z,
                 o.y + co * enu.x - sl * so * enu.y + cl * so * enu.z, o.z + cl * enu.y + sl * enu.z};
  return ecef_to_geodetic(e);
}

/// Lloyd-relaxed centroids the MGVs drive to.
inline std::vector<Point2> communication_targets(const AreaOfInterest& area, std::size_t n_mgv, std::uint64_t seed,
                                                 const LloydOptions& options = {}) {
  if (n_mgv < 1) throw Error(ErrorCode::InvalidArgument, "need at least one MGV");
  return lloyd_relax(n_mgv, area, options, seed).partition.centroids();
}

struct Assignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (mgv, target), sorted by mgv
  double total_distance = 0.0;
  bool used_fallback = false;  // solved by the Hungarian method instead of enumeration
};

/// Minimum-cost perfect matching on a square cost matrix (rows to columns),
/// O(n^3) shortest augmenting paths with potentials.
inline std::vector<std::size_t> hungarian(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);  // match[col] = row, 1-based, 0 = free
  for (std::size_t i = 1; i <= n; ++i) {
    match[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = match[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n);
  for (std::size_t j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

/// Matching of MGVs to targets minimizing the summed Euclidean distance.
/// Up to `enumeration_limit` agents every permutation is tried (first
/// minimum in lexicographic order wins); larger rosters use the Hungarian
/// method, which reaches the same optimum.
inline Assignment optimal_assignment(std::span<const Point2> mgvs, std::span<const Point2> targets,
                                     std::size_t enumeration_limit = 10) {
  if (mgvs.size() != targets.size()) throw Error(ErrorCode::InvalidArgument, "MGV and target counts differ");
  const std::size_t n = mgvs.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i][j] = distance(mgvs[i], targets[j]);
  }
  Assignment out;
  std::vector<std::size_t> best(n);
  if (n <= enumeration_limit) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best_total = std::numeric_limits<double>::infinity();
    do {
      double total = 0.0;
      for (std::size_t i = 0; i < n && total < best_total; ++i) total += d[i][perm[i]];
      if (total < best_total) {
        best_total = total;
        best = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    best = hungarian(d);
    out.used_fallback = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.pairs.emplace_back(i, best[i]);
    out.total_distance += d[i][best[i]];
  }
  return out;
}

inline constexpr std::size_t kTerminalHeadings = 16;

/// One car path per assigned pair. The arrival heading is free: the shortest
/// over 16 headings spaced evenly from the bearing to the target is kept.
inline std::vector<DubinsPath> drive_paths(const Assignment& assignment, std::span<const Pose4> mgv_poses,
                                           std::span<const Point2> targets, double r_min_car) {
  if (!(r_min_car > 0.0)) throw Error(ErrorCode::InvalidArgument, "r_min_car must be > 0");
  std::vector<DubinsPath> paths;
  for (const auto& [i, j] : assignment.pairs) {
    if (i >= mgv_poses.size() || j >= targets.size()) {
      throw Error(ErrorCode::InvalidArgument, "assignment index out of range");
    }
    const Pose4& from = mgv_poses[i];
    const Point2 gap = targets[j] - from.xy();
    if (norm(gap) < 1e-9) {
      DubinsPath stay;
      stay.start = stay.end = from;
      stay.radius = r_min_car;
      paths.push_back(stay);
      continue;
    }
    const double bearing = std::atan2(gap.y, gap.x);
    double best_len = std::numeric_limits<double>::infinity();
    Pose4 best_goal;
    for (std::size_t k = 0; k < kTerminalHeadings; ++k) {
      const Pose4 goal = Pose4::make(targets[j].x, targets[j].y, from.z, bearing + kTwoPi * k / kTerminalHeadings);
      const double len = dubins_car_length(from, goal, r_min_car);
      if (len < best_len) {
        best_len = len;
        best_goal = goal;
      }
    }
    paths.push_back(dubins_car_path(from, best_goal, r_min_car));
  }
  return paths;
}

struct CommNetwork {
  std::vector<Point2> node_positions;
  double comm_range = 0.0;
  bool connected = false;
  std::size_t components = 0;
};

/// Disk graph with an edge whenever two nodes are at most `comm_range` apart.
inline CommNetwork connectivity_check(std::span<const Point2> positions, double comm_range) {
  if (!(comm_range > 0.0)) throw Error(ErrorCode::InvalidArgument, "comm_range must be > 0");
  const std::size_t n = positions.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::size_t components = n;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(positions[i], positions[j]) > comm_range) continue;
      const std::size_t a = find(i), b = find(j);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
  }
  CommNetwork net;
  net.node_positions.assign(positions.begin(), positions.end());
  net.comm_range = comm_range;
  net.components = components;
  net.connected = components <= 1;
  return net;
}

}  // namespace airdrop
