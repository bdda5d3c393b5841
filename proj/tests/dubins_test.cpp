#include "airdrop/dubins.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles/dubins_geometric.hpp"

namespace airdrop {
namespace {

constexpr double kPi = std::numbers::pi;

Pose4 random_pose(Rng& rng, double extent, double z_lo = 0.0, double z_hi = 0.0) {
  return Pose4::make(rng.uniform(-extent, extent), rng.uniform(-extent, extent), rng.uniform(z_lo, z_hi),
                     rng.uniform(0.0, kTwoPi));
}

double oracle_car_length(const Pose4& a, const Pose4& b, double r) {
  return oracle::min_length({a.x, a.y, a.psi}, {b.x, b.y, b.psi}, r);
}

void expect_reaches(const DubinsPath& path, double tol = 1e-6) {
  const Pose4 q = integrate_path(path);
  EXPECT_NEAR(q.x, path.end.x, tol);
  EXPECT_NEAR(q.y, path.end.y, tol);
  EXPECT_NEAR(q.z, path.end.z, tol);
  EXPECT_NEAR(angle_diff(q.psi, path.end.psi), 0.0, tol);
}

TEST(DubinsCar, AlignedCollinearIsStraight) {
  const auto p = dubins_car_path(Pose4::make(0, 0, 0, 0), Pose4::make(10, 0, 0, 0), 1.0);
  ASSERT_EQ(p.segments.size(), 1u);
  EXPECT_EQ(p.segments[0].kind, SegmentKind::Straight);
  EXPECT_NEAR(p.total_length, 10.0, 1e-12);
}

TEST(DubinsCar, HalfTurnIsSingleLeftArc) {
  const auto p = dubins_car_path(Pose4::make(0, 0, 0, 0), Pose4::make(0, 2, 0, kPi), 1.0);
  ASSERT_EQ(p.segments.size(), 1u);
  EXPECT_EQ(p.segments[0].kind, SegmentKind::LeftArc);
  EXPECT_NEAR(p.total_length, kPi, 1e-12);
  expect_reaches(p);
}

TEST(DubinsCar, TurnInPlaceMatchesOracle) {
  const Pose4 a = Pose4::make(0, 0, 0, 0);
  const Pose4 b = Pose4::make(0, 0, 0, kPi);
  const auto p = dubins_car_path(a, b, 1.0);
  EXPECT_NEAR(p.total_length, oracle_car_length(a, b, 1.0), 1e-6);
  expect_reaches(p);
}

TEST(DubinsCar, RandomPairsMatchGeometricOracle) {
  Rng rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double r = rng.uniform(0.5, 5.0);
    const Pose4 a = random_pose(rng, 10.0);
    const Pose4 b = random_pose(rng, 10.0);
    const auto p = dubins_car_path(a, b, r);
    ASSERT_NEAR(p.total_length, oracle_car_length(a, b, r), 1e-6) << "pair " << k;
    expect_reaches(p);
    EXPECT_GE(p.total_length + 1e-9, distance(a.xy(), b.xy()));
  }
}

TEST(DubinsCar, LengthInvariantUnderRigidMotion) {
  Rng rng(2);
  for (int k = 0; k < 200; ++k) {
    const Pose4 a = random_pose(rng, 20.0);
    const Pose4 b = random_pose(rng, 20.0);
    const double rot = rng.uniform(0.0, kTwoPi);
    const Point2 t{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    auto move = [&](const Pose4& q) {
      const double c = std::cos(rot), s = std::sin(rot);
      return Pose4::make(c * q.x - s * q.y + t.x, s * q.x + c * q.y + t.y, q.z, q.psi + rot);
    };
    EXPECT_NEAR(dubins_car_length(a, b, 2.0), dubins_car_length(move(a), move(b), 2.0), 1e-9);
  }
}

TEST(DubinsCar, EqualsEuclideanOnlyWhenAligned) {
  const auto p = dubins_car_path(Pose4::make(1, 1, 0, kPi / 4), Pose4::make(4, 4, 0, kPi / 4), 1.0);
  EXPECT_NEAR(p.total_length, std::sqrt(18.0), 1e-12);
  const auto q = dubins_car_path(Pose4::make(1, 1, 0, kPi / 4), Pose4::make(4, 4, 0, kPi / 2), 1.0);
  EXPECT_GT(q.total_length, std::sqrt(18.0) + 1e-6);
}

TEST(DubinsAirplane, ZeroClimbReducesToCarPath) {
  Rng rng(3);
  const VehicleLimits lim{30.0, 0.25, 20.0};
  for (int k = 0; k < 200; ++k) {
    Pose4 a = random_pose(rng, 300.0);
    Pose4 b = random_pose(rng, 300.0);
    a.z = b.z = 120.0;
    const auto car = dubins_car_path(a, b, lim.r_min);
    const auto air = dubins_airplane_path(a, b, lim);
    EXPECT_EQ(air.altitude_case, AltitudeCase::Low);
    EXPECT_EQ(air.word, car.word);
    EXPECT_EQ(air.total_length, car.total_length);
    ASSERT_EQ(air.segments.size(), car.segments.size());
    for (std::size_t i = 0; i < air.segments.size(); ++i) {
      EXPECT_EQ(air.segments[i].kind, car.segments[i].kind);
      EXPECT_EQ(air.segments[i].flight_path_angle, 0.0);
    }
  }
}

TEST(DubinsAirplane, LowCaseBoundary) {
  const VehicleLimits lim{40.0, 0.2, 20.0};
  const Pose4 a = Pose4::make(0, 0, 0, 0.3);
  Pose4 b = Pose4::make(400, 150, 0, 1.2);
  const double car_len = dubins_car_length(a, b, lim.r_min);
  b.z = car_len * std::tan(lim.gamma_max);
  const auto p = dubins_airplane_path(a, b, lim);
  EXPECT_EQ(p.altitude_case, AltitudeCase::Low);
  EXPECT_EQ(p.helix_turns, 0);
  EXPECT_NEAR(p.total_length, car_len / std::cos(lim.gamma_max), 1e-9);
  expect_reaches(p);
}

// Independent construction: find the helix count by scanning k, then measure
// the path by summing chords of a fine forward integration.
TEST(DubinsAirplane, HighCaseMatchesNumericConstruction) {
  const VehicleLimits lim{40.0, 0.2, 20.0};
  const Pose4 a = Pose4::make(0, 0, 0, 0);
  const Pose4 b = Pose4::make(100, 0, 500, 0);
  const auto p = dubins_airplane_path(a, b, lim);
  ASSERT_EQ(p.altitude_case, AltitudeCase::High);

  const double car_len = oracle_car_length(a, b, lim.r_min);
  int k = 0;
  while ((car_len + kTwoPi * lim.r_min * k) * std::tan(lim.gamma_max) < 500.0) ++k;
  EXPECT_EQ(p.helix_turns, k);
  const double expected = std::hypot(car_len + kTwoPi * lim.r_min * k, 500.0);
  EXPECT_NEAR(p.total_length / expected, 1.0, 1e-4);

  const auto samples = sample_path(p, 0.05);
  double chord_sum = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    chord_sum += std::sqrt(std::pow(samples[i].x - samples[i - 1].x, 2) + std::pow(samples[i].y - samples[i - 1].y, 2) +
                           std::pow(samples[i].z - samples[i - 1].z, 2));
    EXPECT_GE(samples[i].z, samples[i - 1].z - 1e-12);
  }
  EXPECT_NEAR(chord_sum / expected, 1.0, 1e-4);
  expect_reaches(p);
}

TEST(DubinsAirplane, MediumCaseClimbsAtMaxAngle) {
  const VehicleLimits lim{40.0, 0.2, 20.0};
  Rng rng(5);
  int exact = 0;
  for (int k = 0; k < 100; ++k) {
    Pose4 a = random_pose(rng, 600.0);
    Pose4 b = random_pose(rng, 600.0);
    const double car_len = dubins_car_length(a, b, lim.r_min);
    const double lo = car_len * std::tan(lim.gamma_max);
    const double hi = (car_len + kTwoPi * lim.r_min) * std::tan(lim.gamma_max);
    a.z = 0.0;
    b.z = rng.uniform(lo, hi) * (k % 2 ? 1.0 : -1.0);
    const auto p = dubins_airplane_path(a, b, lim);
    ASSERT_EQ(p.altitude_case, AltitudeCase::Medium);
    expect_reaches(p);
    for (const auto& s : p.segments) EXPECT_LE(std::abs(s.flight_path_angle), lim.gamma_max + 1e-9);
    if (!p.medium_fallback) {
      ++exact;
      EXPECT_NEAR(std::abs(p.segments.front().flight_path_angle), lim.gamma_max, 1e-9);
      EXPECT_NEAR(p.total_length, std::abs(b.z) / std::sin(lim.gamma_max), 1e-6);
    }
  }
  // Far-apart endpoints always admit the exact construction.
  EXPECT_GE(exact, 90);
}

TEST(DubinsAirplane, RandomPairsRespectAngleAndReachGoal) {
  const VehicleLimits lim{35.0, 0.3, 18.0};
  Rng rng(6);
  for (int k = 0; k < 300; ++k) {
    const Pose4 a = random_pose(rng, 500.0, 0.0, 600.0);
    const Pose4 b = random_pose(rng, 500.0, 0.0, 600.0);
    const auto p = dubins_airplane_path(a, b, lim);
    expect_reaches(p);
    double sum = 0.0;
    for (const auto& s : p.segments) {
      EXPECT_LE(std::abs(s.flight_path_angle), lim.gamma_max + 1e-9);
      sum += s.length;
    }
    EXPECT_NEAR(sum, p.total_length, 1e-9 * std::max(1.0, sum));
    EXPECT_GE(p.total_length + 1e-9,
              std::sqrt(std::pow(a.x - b.x, 2) + std::pow(a.y - b.y, 2) + std::pow(a.z - b.z, 2)));
  }
}

TEST(SamplePath, StraightSpacing) {
  const auto p = dubins_car_path(Pose4::make(0, 0, 0, 0), Pose4::make(10, 0, 0, 0), 1.0);
  const auto s = sample_path(p, 5.0);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_NEAR(s[0].x, 0.0, 1e-12);
  EXPECT_NEAR(s[1].x, 5.0, 1e-12);
  EXPECT_NEAR(s[2].x, 10.0, 1e-12);
}

TEST(SamplePath, EndpointsAndSpacing) {
  Rng rng(7);
  const VehicleLimits lim{25.0, 0.2, 20.0};
  for (int k = 0; k < 50; ++k) {
    const auto p = dubins_airplane_path(random_pose(rng, 300, 0, 200), random_pose(rng, 300, 0, 200), lim);
    const auto s = sample_path(p, 7.0);
    EXPECT_NEAR(s.front().x, p.start.x, 1e-9);
    EXPECT_NEAR(s.back().x, p.end.x, 1e-6);
    EXPECT_NEAR(s.back().y, p.end.y, 1e-6);
    EXPECT_NEAR(s.back().z, p.end.z, 1e-6);
    for (std::size_t i = 1; i < s.size(); ++i) {
      const double chord = std::sqrt(std::pow(s[i].x - s[i - 1].x, 2) + std::pow(s[i].y - s[i - 1].y, 2) +
                                     std::pow(s[i].z - s[i - 1].z, 2));
      EXPECT_LE(chord, 7.0 + 1e-9);
    }
  }
}

TEST(SamplePath, ArcSamplesStayOnCircle) {
  const auto p = dubins_car_path(Pose4::make(0, 0, 0, 0), Pose4::make(0, 2, 0, kPi), 1.0);
  for (const auto& q : sample_path(p, kPi / 180.0)) {
    EXPECT_NEAR(std::hypot(q.x, q.y - 1.0), 1.0, 1e-9);
  }
}

TEST(PathDuration, LinearInLength) {
  const VehicleLimits lim{10.0, 0.2, 20.0};
  const auto p = dubins_car_path(Pose4::make(0, 0, 0, 0), Pose4::make(100, 0, 0, 0), 10.0);
  EXPECT_NEAR(path_duration(p, lim), 5.0, 1e-12);
  const auto z = dubins_car_path(Pose4::make(3, 3, 0, 1), Pose4::make(3, 3, 0, 1), 10.0);
  EXPECT_EQ(path_duration(z, lim), 0.0);
  const auto p2 = dubins_car_path(Pose4::make(100, 0, 0, 0), Pose4::make(100, 80, 0, kPi), 10.0);
  DubinsPath both = p;
  for (const auto& s : p2.segments) both.segments.push_back(s);
  both.total_length = p.total_length + p2.total_length;
  EXPECT_NEAR(path_duration(p, lim) + path_duration(p2, lim), path_duration(both, lim), 1e-12);
}

}  // namespace
}  // namespace airdrop
