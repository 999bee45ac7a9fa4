#include <random>

#include <gtest/gtest.h>

#include "phmp/cones.hpp"
#include "phmp/error.hpp"
#include "phmp/linalg.hpp"

using namespace phmp;

namespace {

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return normalized(Vec3{n(rng), n(rng), n(rng)});
}

}  // namespace

TEST(Linalg, InverseRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 200; ++k) {
    Mat3 m{{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)}};
    if (std::abs(m.det()) < 1e-3) continue;
    EXPECT_LT(max_abs_entry(m * inverse(m) - Mat3::identity()), 1e-9);
  }
  EXPECT_THROW(inverse(Mat3::diag(1, 0, 1)), Error);
}

TEST(Linalg, Eigenvalues2) {
  auto e = eigenvalues2(0.25 * Mat2::rotation(0.7));
  EXPECT_TRUE(e.non_real);
  EXPECT_NEAR(std::abs(e.first), 0.25, 1e-14);
  auto d = eigenvalues2(Mat2::diag(0.2, 3));
  EXPECT_FALSE(d.non_real);
  EXPECT_NEAR(std::min(d.first.real(), d.second.real()), 0.2, 1e-14);
}

TEST(Linalg, RestrictedDeterminantOfDiagonal) {
  // xy-plane to itself along z: the determinant of the xy block
  Mat3 l = Mat3::diag(0.25, 0.5, 3);
  EXPECT_NEAR(restricted_determinant(l, make_plane({0, 0, 1}), make_plane({0, 0, 1}), {0, 0, 1}), 0.125, 1e-15);
  EXPECT_THROW(restricted_matrix(l, make_plane({0, 0, 1}), make_plane({0, 0, 1}), {1, 0, 0}), Error);
}

TEST(Linalg, RestrictedMatrixComposes) {
  // projecting along a common transversal commutes with composition when the middle plane matches
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 50; ++k) {
    Mat3 a = Mat3::diag(0.3, 0.4, 2) + 0.1 * Mat3{{u(rng), u(rng), 0, u(rng), u(rng), 0, 0, 0, 0}};
    Mat3 b = Mat3::diag(0.5, 0.2, 3) + 0.1 * Mat3{{u(rng), u(rng), 0, u(rng), u(rng), 0, 0, 0, 0}};
    Plane p = make_plane({0, 0, 1});
    Mat2 ra = restricted_matrix(a, p, p, {0, 0, 1}), rb = restricted_matrix(b, p, p, {0, 0, 1});
    Mat2 rab = restricted_matrix(b * a, p, p, {0, 0, 1});
    EXPECT_LT(max_abs_entry(rb * ra - rab), 1e-12);
  }
}

TEST(Cones, ValidationErrors) {
  EXPECT_THROW(validate(Cone{CircularCone{{0, 0, 1}, 0}}), Error);
  EXPECT_THROW(validate(Cone{CircularCone{{0, 0, 1}, kPi / 2}}), Error);
  EXPECT_THROW(validate(Cone{CircularCone{{0, 0, 0}, 0.3}}), Error);
  try {
    circular_cone({0, 0, 0}, 0.3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_cone);
  }
}

TEST(Cones, SlackMatchesAngleForCircularCone) {
  std::mt19937_64 rng(11);
  Cone c = circular_cone({0, 0, 1}, deg(30));
  for (int k = 0; k < 500; ++k) {
    Vec3 v = random_unit(rng);
    double angle = std::min(angle_between(v, {0, 0, 1}), angle_between(-v, {0, 0, 1}));
    EXPECT_NEAR(angular_slack(c, v), deg(30) - angle, 1e-12);
    EXPECT_EQ(contains(c, v), angle <= deg(30) + 1e-12);
  }
}

// property: the push-forward cone contains the image of every vector of the source cone
TEST(Cones, PushForwardContainsImages) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 30; ++trial) {
    Mat3 l = Mat3::diag(1, 1, 1) + 0.5 * Mat3{{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)}};
    if (std::abs(l.det()) < 0.1) continue;
    Cone c = circular_cone(random_unit(rng), deg(20 + 40 * (u(rng) + 1) / 2));
    Cone img = push_forward(l, c);
    for (const Vec3& v : interior_rays(c, 3, 12)) EXPECT_GT(angular_slack(img, l * v), -1e-6);
  }
}

TEST(Cones, StrictContainmentMonotoneInMargin) {
  Cone inner = circular_cone({0, 0, 1}, deg(20)), outer = circular_cone({0, 0, 1}, deg(30));
  EXPECT_NEAR(containment_slack(inner, outer), deg(10), 1e-9);
  EXPECT_TRUE(cone_strictly_contained(inner, outer, 360, deg(9)));
  EXPECT_FALSE(cone_strictly_contained(inner, outer, 360, deg(11)));
  EXPECT_FALSE(cone_strictly_contained(outer, inner));
}
