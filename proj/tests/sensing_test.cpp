#include "airdrop/sensing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

namespace airdrop {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(FootprintHalfwidth, KnownValues) {
  EXPECT_NEAR(footprint_halfwidth(100.0, kPi / 2.0), 100.0, 1e-12);
  // tan(pi/6) = 1/sqrt(3)
  EXPECT_NEAR(footprint_halfwidth(100.0, kPi / 3.0), 100.0 / std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(footprint_halfwidth(200.0, 1.1), 2.0 * footprint_halfwidth(100.0, 1.1), 1e-12);
}

TEST(FootprintHalfwidth, RejectsNonPositiveAltitude) {
  try {
    footprint_halfwidth(0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidAltitude);
  }
  EXPECT_THROW(required_viewpoints(AreaOfInterest::make({0, 0}, 10, 10), -5.0, 1.0), Error);
}

TEST(RequiredViewpoints, Examples) {
  EXPECT_EQ(required_viewpoints(AreaOfInterest::make({0, 0}, 1000, 1000), 100.0, kPi / 2.0), 25u);
  EXPECT_EQ(required_viewpoints(AreaOfInterest::make({0, 0}, 1000, 500), 100.0, kPi / 2.0), 13u);
  EXPECT_EQ(required_viewpoints(AreaOfInterest::make({0, 0}, 100, 100), 1000.0, kPi / 2.0), 1u);
}

TEST(RequiredViewpoints, CapacityCoversArea) {
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const auto area = AreaOfInterest::make({0, 0}, rng.uniform(10, 5000), rng.uniform(10, 5000));
    const double z = rng.uniform(10, 800);
    const double fov = rng.uniform(0.2, 2.8);
    const double side = 2.0 * z * std::tan(fov / 2.0);
    const auto n = required_viewpoints(area, z, fov);
    EXPECT_GE(static_cast<double>(n) * side * side, area.area() * (1.0 - 1e-9));
    if (n > 1) {
      EXPECT_LT(static_cast<double>(n - 1) * side * side, area.area());
    }
  }
}

TEST(CoverageGrid, FreshAndFull) {
  const auto area = AreaOfInterest::make({10, 20}, 100, 50);
  CoverageGrid g(area, 1.0);
  EXPECT_EQ(g.nx(), 100u);
  EXPECT_EQ(g.ny(), 50u);
  EXPECT_EQ(coverage_fraction(g), 0.0);
  const CameraModel disk{kPi / 2.0, FootprintShape::Disk};
  g = mark_footprint(g, Pose4::make(60, 45, 500, 0), disk);
  EXPECT_EQ(coverage_fraction(g), 1.0);
}

TEST(CoverageGrid, TinyFootprintMarksAtMostOneCell) {
  const auto area = AreaOfInterest::make({0, 0}, 10, 10);
  CoverageGrid g(area, 1.0);
  const CameraModel disk{kPi / 2.0, FootprintShape::Disk};
  g.mark_footprint(Pose4::make(5.0, 5.0, 0.1, 0), disk);
  EXPECT_EQ(g.covered_cells(), 0u);
  g.mark_footprint(Pose4::make(5.5, 5.5, 0.1, 0), disk);
  EXPECT_EQ(g.covered_cells(), 1u);
}

TEST(CoverageGrid, DiskEdgeMatchesAnalyticOverlap) {
  const auto area = AreaOfInterest::make({0, 0}, 100, 100);
  CoverageGrid g(area, 1.0);
  const Point2 c{-1000.0, 50.0};
  const double r = 1050.0;
  g.mark_disk(c, r);
  // Area of {x in [0,100], y in [0,100]} inside the disk, by Simpson's rule
  // on the covered width per row.
  auto width = [&](double y) {
    const double half = std::sqrt(r * r - (y - c.y) * (y - c.y));
    return std::clamp(c.x + half, 0.0, 100.0);
  };
  const int n = 2000;
  double s = width(0.0) + width(100.0);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * width(100.0 * k / n);
  const double analytic = s * (100.0 / n) / 3.0 / area.area();
  EXPECT_NEAR(analytic, 0.4960, 1e-3);
  EXPECT_NEAR(g.covered_fraction(), analytic, 2.0 * 1.0 * 100.0 / area.area());
}

TEST(CoverageGrid, SquareFootprint) {
  const auto area = AreaOfInterest::make({0, 0}, 100, 100);
  CoverageGrid g(area, 1.0);
  const CameraModel sq{kPi / 2.0, FootprintShape::Square};
  g.mark_footprint(Pose4::make(50, 50, 10, 1.0), sq);  // 20 x 20 square
  EXPECT_EQ(g.covered_cells(), 400u);
}

TEST(CoverageGrid, MonotoneAndIdempotent) {
  const auto area = AreaOfInterest::make({0, 0}, 200, 120);
  CoverageGrid g(area, 2.0);
  const CameraModel disk{1.0, FootprintShape::Disk};
  Rng rng(9);
  double prev = 0.0;
  for (int k = 0; k < 30; ++k) {
    const Pose4 p = Pose4::make(rng.uniform(-20, 220), rng.uniform(-20, 140), rng.uniform(1, 60), 0);
    CoverageGrid before = g;
    g.mark_footprint(p, disk);
    EXPECT_TRUE(before.subset_of(g));
    EXPECT_GE(g.covered_fraction(), prev);
    prev = g.covered_fraction();
    CoverageGrid again = g;
    again.mark_footprint(p, disk);
    EXPECT_TRUE(again.same_cells(g));
    EXPECT_EQ(again.covered_cells(), g.covered_cells());
  }
}

TEST(CoverageGrid, MergeIsAssociativeAndCommutative) {
  const auto area = AreaOfInterest::make({0, 0}, 100, 100);
  const CameraModel disk{1.2, FootprintShape::Disk};
  CoverageGrid a(area, 1.0), b(area, 1.0), c(area, 1.0);
  a.mark_footprint(Pose4::make(20, 20, 20, 0), disk);
  b.mark_footprint(Pose4::make(40, 30, 25, 0), disk);
  c.mark_footprint(Pose4::make(70, 80, 30, 0), disk);

  CoverageGrid ab = a;
  ab.merge(b);
  CoverageGrid ba = b;
  ba.merge(a);
  EXPECT_TRUE(ab.same_cells(ba));
  EXPECT_EQ(ab.covered_cells(), ba.covered_cells());

  CoverageGrid ab_c = ab;
  ab_c.merge(c);
  CoverageGrid bc = b;
  bc.merge(c);
  CoverageGrid a_bc = a;
  a_bc.merge(bc);
  EXPECT_TRUE(ab_c.same_cells(a_bc));
  EXPECT_EQ(ab_c.covered_cells(), a_bc.covered_cells());

  CoverageGrid other(AreaOfInterest::make({0, 0}, 50, 50), 1.0);
  EXPECT_THROW(a.merge(other), Error);
}

TEST(CoverageGrid, PgmHeader) {
  CoverageGrid g(AreaOfInterest::make({0, 0}, 4, 2), 1.0);
  g.mark_square({0.5, 1.5}, 0.1);
  std::ostringstream os;
  g.write_pgm(os);
  const std::string s = os.str();
  ASSERT_EQ(s.rfind("P5\n", 0), 0u);
  EXPECT_NE(s.find("# resolution 1\n"), std::string::npos);
  const auto pos = s.find("4 2\n255\n");
  ASSERT_NE(pos, std::string::npos);
  const std::string pixels = s.substr(pos + 8);
  ASSERT_EQ(pixels.size(), 8u);
  // Top-left pixel is cell (0, 1).
  EXPECT_EQ(static_cast<unsigned char>(pixels[0]), 255u);
  EXPECT_EQ(static_cast<unsigned char>(pixels[4]), 0u);
}

}  // namespace
}  // namespace airdrop
