#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "airdrop/dubins.hpp"
#include "airdrop/error.hpp"
#include "airdrop/geometry.hpp"

namespace airdrop {

enum class FootprintShape { Square, Disk };

/// Nadir-mounted camera with full cone angle `fov`.
struct CameraModel {
  double fov = std::numbers::pi / 2.0;
  FootprintShape footprint = FootprintShape::Square;

  void validate() const {
    if (!(fov > 0.0 && fov < std::numbers::pi)) throw Error(ErrorCode::InvalidArgument, "camera fov must lie in (0, pi)");
  }
};

/// Half the footprint width at altitude z: z * tan(fov / 2).
inline double footprint_halfwidth(double z, double fov) {
  if (!(z > 0.0)) throw Error(ErrorCode::InvalidAltitude, "altitude must be > 0");
  return z * std::tan(0.5 * fov);
}

/// Number of evenly spread viewpoints whose square footprints of side
/// 2 z tan(fov/2) can tile the area, rounded up, at least 1.
inline std::size_t required_viewpoints(const AreaOfInterest& area, double z_c, double fov) {
  const double side = 2.0 * footprint_halfwidth(z_c, fov);
  const double ratio = area.area() / (side * side);
  // Ratios that are integers up to roundoff must not be bumped to the next count.
  const double n = std::ceil(ratio * (1.0 - 1e-12));
  return static_cast<std::size_t>(std::max(1.0, n));
}

/// Rasterized area of interest. Cells tile the bounds exactly; the nominal
/// resolution is an upper bound on the cell size along each axis.
class CoverageGrid {
 public:
  CoverageGrid(const AreaOfInterest& bounds, double resolution) : bounds_(bounds), resolution_(resolution) {
    if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid resolution must be > 0");
    nx_ = static_cast<std::size_t>(std::max(1.0, std::ceil(bounds.d_x / resolution - 1e-9)));
    ny_ = static_cast<std::size_t>(std::max(1.0, std::ceil(bounds.d_y / resolution - 1e-9)));
    cell_w_ = bounds.d_x / static_cast<double>(nx_);
    cell_h_ = bounds.d_y / static_cast<double>(ny_);
    covered_.assign(nx_ * ny_, 0);
  }

  static double default_resolution(const AreaOfInterest& bounds) { return std::min(bounds.d_x, bounds.d_y) / 500.0; }

  const AreaOfInterest& bounds() const { return bounds_; }
  double resolution() const { return resolution_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t total_cells() const { return covered_.size(); }
  std::size_t covered_cells() const { return count_; }
  double covered_fraction() const { return static_cast<double>(count_) / static_cast<double>(covered_.size()); }

  bool covered(std::size_t i, std::size_t j) const { return covered_[j * nx_ + i] != 0; }

  Point2 cell_center(std::size_t i, std::size_t j) const {
    return {bounds_.min_x() + (static_cast<double>(i) + 0.5) * cell_w_,
            bounds_.min_y() + (static_cast<double>(j) + 0.5) * cell_h_};
  }

  /// Marks every cell whose center lies within `radius` of `center`.
  void mark_disk(Point2 center, double radius) {
    if (!(radius >= 0.0)) return;
    const double r2 = radius * radius;
    const auto [j0, j1] = index_range(center.y - radius, center.y + radius, bounds_.min_y(), cell_h_, ny_);
    for (long j = j0; j <= j1; ++j) {
      const double cy = bounds_.min_y() + (static_cast<double>(j) + 0.5) * cell_h_;
      const double dy2 = (cy - center.y) * (cy - center.y);
      if (dy2 > r2) continue;
      const double half = std::sqrt(r2 - dy2);
      auto [i0, i1] = index_range(center.x - half, center.x + half, bounds_.min_x(), cell_w_, nx_);
      auto inside = [&](long i) {
        const double cx = bounds_.min_x() + (static_cast<double>(i) + 0.5) * cell_w_;
        return (cx - center.x) * (cx - center.x) + dy2 <= r2;
      };
      // Settle span ends on the exact predicate.
      while (i0 <= i1 && !inside(i0)) ++i0;
      while (i1 >= i0 && !inside(i1)) --i1;
      while (i0 > 0 && inside(i0 - 1)) --i0;
      while (i1 + 1 < static_cast<long>(nx_) && inside(i1 + 1)) ++i1;
      fill_row(static_cast<std::size_t>(j), i0, i1);
    }
  }

  /// Marks every cell whose center lies in the axis-aligned square of half side `half`.
  void mark_square(Point2 center, double half) {
    if (!(half >= 0.0)) return;
    const auto [j0, j1] = index_range(center.y - half, center.y + half, bounds_.min_y(), cell_h_, ny_);
    const auto [i0, i1] = index_range(center.x - half, center.x + half, bounds_.min_x(), cell_w_, nx_);
    for (long j = j0; j <= j1; ++j) fill_row(static_cast<std::size_t>(j), i0, i1);
  }

  void mark_footprint(const Pose4& pose, const CameraModel& camera) {
    const double half = footprint_halfwidth(pose.z, camera.fov);
    if (camera.footprint == FootprintShape::Disk) {
      mark_disk(pose.xy(), half);
    } else {
      mark_square(pose.xy(), half);
    }
  }

  /// Cell-wise OR with a grid of identical geometry.
  void merge(const CoverageGrid& other) {
    if (other.nx_ != nx_ || other.ny_ != ny_ || other.cell_w_ != cell_w_ || other.cell_h_ != cell_h_ ||
        !(other.bounds_.origin == bounds_.origin)) {
      throw Error(ErrorCode::InvalidArgument, "cannot merge grids of different geometry");
    }
    for (std::size_t k = 0; k < covered_.size(); ++k) {
      if (other.covered_[k] && !covered_[k]) {
        covered_[k] = 1;
        ++count_;
      }
    }
  }

  bool same_cells(const CoverageGrid& other) const { return covered_ == other.covered_; }

  /// True when every cell covered here is covered in `other` too.
  bool subset_of(const CoverageGrid& other) const {
    for (std::size_t k = 0; k < covered_.size(); ++k) {
      if (covered_[k] && !other.covered_[k]) return false;
    }
    return true;
  }

  /// Binary PGM, covered cells white, north up. Bounds and resolution go in
  /// the header comments.
  void write_pgm(std::ostream& os) const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "P5\n# origin_x %.9g\n# origin_y %.9g\n# d_x %.9g\n# d_y %.9g\n# resolution %.9g\n%zu %zu\n255\n",
                  bounds_.origin.x, bounds_.origin.y, bounds_.d_x, bounds_.d_y, resolution_, nx_, ny_);
    os << buf;
    std::vector<char> row(nx_);
    for (std::size_t jj = 0; jj < ny_; ++jj) {
      const std::size_t j = ny_ - 1 - jj;
      for (std::size_t i = 0; i < nx_; ++i) row[i] = covered_[j * nx_ + i] ? static_cast<char>(255) : 0;
      os.write(row.data(), static_cast<std::streamsize>(nx_));
    }
  }

 private:
  // Inclusive index range of cells whose centers may fall in [lo, hi].
  static std::pair<long, long> index_range(double lo, double hi, double origin, double cell, std::size_t count) {
    long a = static_cast<long>(std::ceil((lo - origin) / cell - 0.5 - 1e-9));
    long b = static_cast<long>(std::floor((hi - origin) / cell - 0.5 + 1e-9));
    a = std::max(a, 0L);
    b = std::min(b, static_cast<long>(count) - 1);
    return {a, b};
  }

  void fill_row(std::size_t j, long i0, long i1) {
    if (i0 > i1) return;
    std::uint8_t* row = covered_.data() + j * nx_;
    for (long i = i0; i <= i1; ++i) {
      count_ += row[i] ^ 1u;
      row[i] = 1;
    }
  }

  AreaOfInterest bounds_;
  double resolution_;
  std::size_t nx_ = 0, ny_ = 0;
  double cell_w_ = 0.0, cell_h_ = 0.0;
  std::vector<std::uint8_t> covered_;
  std::size_t count_ = 0;
};

inline CoverageGrid mark_footprint(CoverageGrid grid, const Pose4& pose, const CameraModel& camera) {
  grid.mark_footprint(pose, camera);
  return grid;
}

inline double coverage_fraction(const CoverageGrid& grid) { return grid.covered_fraction(); }

}  // namespace airdrop
