#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "airdrop/error.hpp"
#include "airdrop/random.hpp"

namespace airdrop {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Point2 a) { return dot(a, a); }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Axis-aligned rectangular area [origin.x, origin.x + d_x] x [origin.y, origin.y + d_y].
struct AreaOfInterest {
  Point2 origin;
  double d_x = 1.0;
  double d_y = 1.0;

  static AreaOfInterest make(Point2 origin, double d_x, double d_y) {
    if (!(d_x > 0.0) || !(d_y > 0.0) || !std::isfinite(d_x) || !std::isfinite(d_y) || !is_finite(origin)) {
      throw Error(ErrorCode::InvalidArgument, "area of interest needs finite d_x > 0 and d_y > 0");
    }
    return AreaOfInterest{origin, d_x, d_y};
  }

  double area() const { return d_x * d_y; }
  double min_x() const { return origin.x; }
  double min_y() const { return origin.y; }
  double max_x() const { return origin.x + d_x; }
  double max_y() const { return origin.y + d_y; }
  Point2 center() const { return {origin.x + 0.5 * d_x, origin.y + 0.5 * d_y}; }

  bool contains(Point2 p, double eps = 0.0) const {
    return p.x >= min_x() - eps && p.x <= max_x() + eps && p.y >= min_y() - eps && p.y <= max_y() + eps;
  }

  /// Counter-clockwise corner list starting at the origin.
  std::vector<Point2> corners() const {
    return {{min_x(), min_y()}, {max_x(), min_y()}, {max_x(), max_y()}, {min_x(), max_y()}};
  }
};

using Polygon = std::vector<Point2>;

/// Signed shoelace area, positive for counter-clockwise vertex order.
inline double signed_area(std::span<const Point2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    twice += cross(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * twice;
}

inline double polygon_area(std::span<const Point2> poly) { return std::abs(signed_area(poly)); }

inline Point2 polygon_centroid(std::span<const Point2> poly) {
  // Shift to the first vertex so large coordinates do not swamp the sums.
  const Point2 ref = poly.front();
  double twice_area = 0.0;
  Point2 acc;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point2 a = poly[i] - ref;
    const Point2 b = poly[(i + 1) % n] - ref;
    const double c = cross(a, b);
    twice_area += c;
    acc = acc + c * (a + b);
  }
  return ref + (1.0 / (3.0 * twice_area)) * acc;
}

/// Polar second moment  ∫ ||p - about||^2 dA  over a simple polygon.
inline double polygon_second_moment(std::span<const Point2> poly, Point2 about) {
  double sum = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point2 a = poly[i] - about;
    const Point2 b = poly[(i + 1) % n] - about;
    sum += cross(a, b) * (a.x * a.x + a.x * b.x + b.x * b.x + a.y * a.y + a.y * b.y + b.y * b.y);
  }
  return std::abs(sum) / 12.0;
}

/// Point-in-convex-polygon test for counter-clockwise polygons.
inline bool convex_contains(std::span<const Point2> poly, Point2 p, double eps = 1e-9) {
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Point2 a = poly[i];
    const Point2 b = poly[(i + 1) % n];
    const double len = distance(a, b);
    if (len == 0.0) continue;
    if (cross(b - a, p - a) / len < -eps) return false;
  }
  return true;
}

/// Sutherland-Hodgman clip of a convex polygon against the half-plane
/// { p : dot(normal, p) <= offset }.
inline Polygon clip_half_plane(const Polygon& poly, Point2 normal, double offset) {
  Polygon out;
  out.reserve(poly.size() + 1);
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 cur = poly[i];
    const Point2 nxt = poly[(i + 1) % n];
    const double dc = dot(normal, cur) - offset;
    const double dn = dot(normal, nxt) - offset;
    if (dc <= 0.0) out.push_back(cur);
    if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
      const double t = dc / (dc - dn);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  // Collapse duplicate vertices created by clips through an existing vertex.
  Polygon cleaned;
  cleaned.reserve(out.size());
  for (const Point2& p : out) {
    if (cleaned.empty() || norm2(p - cleaned.back()) > 1e-24) cleaned.push_back(p);
  }
  while (cleaned.size() > 1 && norm2(cleaned.front() - cleaned.back()) <= 1e-24) cleaned.pop_back();
  return cleaned;
}

struct VoronoiCell {
  Point2 site;
  Polygon polygon;  // counter-clockwise, clipped to the bounds
  Point2 centroid;
  double area = 0.0;
};

struct VoronoiPartition {
  std::vector<VoronoiCell> cells;
  AreaOfInterest bounds;

  std::vector<Point2> sites() const {
    std::vector<Point2> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(c.site);
    return out;
  }

  std::vector<Point2> centroids() const {
    std::vector<Point2> out;
    out.reserve(cells.size());
    for (const auto& c : cells) out.push_back(c.centroid);
    return out;
  }

  /// Quantization energy: sum over cells of ∫ ||p - site||^2 dp.
  double energy() const {
    double e = 0.0;
    for (const auto& c : cells) e += polygon_second_moment(c.polygon, c.site);
    return e;
  }

  /// Nearest-site index of p; ties go to the lowest index.
  std::size_t locate(Point2 p) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double d = norm2(p - cells[i].site);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }
};

namespace detail {

inline double bounds_eps(const AreaOfInterest& b) { return 1e-9 * std::max({1.0, b.d_x, b.d_y}); }

inline void validate_sites(std::span<const Point2> sites, const AreaOfInterest& bounds, double min_separation) {
  if (sites.empty()) throw Error(ErrorCode::InvalidArgument, "voronoi partition needs at least one site");
  const double eps = bounds_eps(bounds);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (!is_finite(sites[i])) throw Error(ErrorCode::InvalidArgument, "non-finite site");
    if (!bounds.contains(sites[i], eps)) {
      throw Error(ErrorCode::OutOfBounds, "site " + std::to_string(i) + " lies outside the area of interest");
    }
  }
  const double min_sep2 = min_separation * min_separation;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = i + 1; j < sites.size(); ++j) {
      if (norm2(sites[i] - sites[j]) < min_sep2) {
        throw Error(ErrorCode::DegenerateSites,
                    "sites " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
    }
  }
}

}  // namespace detail

/// Bounded Voronoi diagram by half-plane clipping of the bounding rectangle.
/// Cells are returned in site order.
inline VoronoiPartition voronoi_partition(std::span<const Point2> sites, const AreaOfInterest& bounds) {
  detail::validate_sites(sites, bounds, 1e-9);
  const std::size_t n = sites.size();

  VoronoiPartition part;
  part.bounds = bounds;
  part.cells.resize(n);

  std::vector<std::size_t> order(n);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 s = sites[i];
    // Work in site-centered coordinates for conditioning.
    Polygon poly;
    for (const Point2& c : bounds.corners()) poly.push_back(c - s);

    for (std::size_t j = 0; j < n; ++j) d2[j] = norm2(sites[j] - s);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return d2[a] != d2[b] ? d2[a] < d2[b] : a < b;
    });

    for (std::size_t j : order) {
      if (j == i) continue;
      double reach2 = 0.0;
      for (const Point2& v : poly) reach2 = std::max(reach2, norm2(v));
      // A bisector farther than the farthest vertex cannot cut the cell.
      if (d2[j] > 4.0 * reach2) break;
      const Point2 d = sites[j] - s;
      poly = clip_half_plane(poly, d, 0.5 * norm2(d));
      if (poly.size() < 3) break;
    }

    VoronoiCell& cell = part.cells[i];
    cell.site = s;
    cell.polygon.reserve(poly.size());
    for (const Point2& v : poly) cell.polygon.push_back(v + s);
    if (cell.polygon.size() < 3) {
      throw Error(ErrorCode::DegenerateSites, "cell " + std::to_string(i) + " collapsed");
    }
    cell.area = polygon_area(cell.polygon);
    if (!(cell.area > 0.0)) throw Error(ErrorCode::DegenerateSites, "cell " + std::to_string(i) + " has zero area");
    cell.centroid = polygon_centroid(cell.polygon);
  }
  return part;
}

/// One Lloyd update: the centroid of every cell, in cell order.
inline std::vector<Point2> lloyd_step(const VoronoiPartition& partition) { return partition.centroids(); }

struct LloydOptions {
  double rel_improvement_threshold = 1e-4;
  int max_iters = 200;
};

struct LloydResult {
  VoronoiPartition partition;
  std::vector<double> energy_history;             // energy of every partition computed, in order
  std::vector<std::vector<Point2>> site_history;  // sites of every partition computed, in order
  int iterations = 0;                             // number of centroid updates applied
  bool converged = false;
};

/// n sites drawn uniformly in the bounds.
inline std::vector<Point2> random_sites(std::size_t n, const AreaOfInterest& bounds, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point2> sites(n);
  for (auto& s : sites) {
    s.x = rng.uniform(bounds.min_x(), bounds.max_x());
    s.y = rng.uniform(bounds.min_y(), bounds.max_y());
  }
  return sites;
}

/// Lloyd relaxation towards a centroidal Voronoi tessellation. Stops when the
/// relative energy decrease of an update falls below the threshold or after
/// max_iters updates. The seed is only used when initial_sites is empty, in
/// which case n_random sites are drawn.
inline LloydResult lloyd_relax(std::vector<Point2> initial_sites, const AreaOfInterest& bounds,
                               const LloydOptions& options, std::uint64_t seed = 0, std::size_t n_random = 0) {
  if (!(options.rel_improvement_threshold > 0.0 && options.rel_improvement_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "lloyd threshold must lie in (0, 1)");
  }
  if (options.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "lloyd max_iters must be >= 1");
  if (initial_sites.empty()) initial_sites = random_sites(n_random, bounds, seed);

  LloydResult result;
  result.partition = voronoi_partition(initial_sites, bounds);
  double energy = result.partition.energy();
  result.energy_history.push_back(energy);
  result.site_history.push_back(std::move(initial_sites));

  for (int it = 1; it <= options.max_iters; ++it) {
    std::vector<Point2> next = lloyd_step(result.partition);
    VoronoiPartition next_part = voronoi_partition(next, bounds);
    const double next_energy = next_part.energy();
    result.energy_history.push_back(next_energy);
    result.site_history.push_back(std::move(next));
    result.partition = std::move(next_part);
    result.iterations = it;
    const double rel = (energy - next_energy) / energy;
    energy = next_energy;
    if (rel < options.rel_improvement_threshold) {
      result.converged = true;
      break;
    }
  }
  return result;
}

inline LloydResult lloyd_relax(std::size_t n_sites, const AreaOfInterest& bounds, const LloydOptions& options,
                               std::uint64_t seed) {
  if (n_sites == 0) throw Error(ErrorCode::InvalidArgument, "lloyd relaxation needs at least one site");
  return lloyd_relax(std::vector<Point2>{}, bounds, options, seed, n_sites);
}

/// Coefficient of variation of nearest-neighbor distances between sites.
inline double nearest_neighbor_cv(std::span<const Point2> sites) {
  if (sites.size() < 2) return 0.0;
  std::vector<double> nn(sites.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = 0; j < sites.size(); ++j) {
      if (i != j) nn[i] = std::min(nn[i], distance(sites[i], sites[j]));
    }
  }
  const double mean = std::accumulate(nn.begin(), nn.end(), 0.0) / static_cast<double>(nn.size());
  double var = 0.0;
  for (double d : nn) var += (d - mean) * (d - mean);
  var /= static_cast<double>(nn.size());
  return std::sqrt(var) / mean;
}

}  // namespace airdrop
