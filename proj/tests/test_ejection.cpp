#include <cmath>

#include <gtest/gtest.h>

#include "phmp/ejection.hpp"
#include "phmp/error.hpp"
#include "phmp/models.hpp"

using namespace phmp;

namespace {

Curve2 circle(double cx, double cy, double r) {
  Curve2 c;
  for (int k = 0; k <= 64; ++k) {
    double t = 2 * kPi * k / 64;
    c.push_back({cx + r * std::cos(t), cy + r * std::sin(t)});
  }
  return c;
}

}  // namespace

TEST(Obstacles, HorseshoeFixedPointHasOneComponent) {
  auto hs = make_model("horseshoe3d");
  auto d = delta_d_components(*hs, horseshoe_partition(), "p", 32);
  ASSERT_EQ(d.components.size(), 1u);
  EXPECT_FALSE(d.inconclusive);
  EXPECT_EQ(d.doubled_count, 1);
  // the other branch's image of R: x in [0.3, 0.7], |y| <= 1/2 inside the unit disc
  const auto& c = d.components[0];
  EXPECT_NEAR(c.centroid[0], 0.5, 0.03);
  EXPECT_NEAR(c.centroid[1], 0.0, 0.03);
}

TEST(Obstacles, RasterLabelsAreConsistent) {
  auto hs = make_model("horseshoe3d");
  auto d = delta_d_components(*hs, horseshoe_partition(), "q2", 32, false);
  const auto& r = d.raster;
  int total = 0;
  for (const auto& c : d.components) total += c.cells;
  int obstacle = 0;
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j < r.n; ++j) {
      Point2 q = r.center(i, j);
      bool inside = std::hypot(q[0] - r.disc.center[r.axes[0]], q[1] - r.disc.center[r.axes[1]]) <= r.disc.radius;
      EXPECT_EQ(r.at(i, j) != 0, inside);
      obstacle += r.at(i, j) == 3;
    }
  EXPECT_EQ(obstacle, total);
}

TEST(Obstacles, NeedsDiscAndResolution) {
  auto f = make_model("contraction");
  try {
    delta_d_components(*f, identity_partition(), "origin", 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_marker);
  }
  auto hs = make_model("horseshoe3d");
  EXPECT_THROW(delta_d_components(*hs, horseshoe_partition(), "p", 4), Error);
}

TEST(Ejection, CurveChecks) {
  auto hs = make_model("horseshoe3d");
  auto mp = horseshoe_partition();
  try {
    ejection_certificate(*hs, mp, "q2", {circle(0, 0, 1.2)}, 0, 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_curve);
  }
  EXPECT_THROW(ejection_certificate(*hs, mp, "q2", {}, 0, 16), Error);
  auto c = ejection_certificate(*hs, mp, "q2", {circle(0, 0.6, 0.15), circle(0, -0.6, 0.15)}, 0, 32);
  EXPECT_TRUE(c.curves_clear);
  EXPECT_GE(c.min_clearance_cells, 2);
  // a curve hugging the obstacle fails the clearance test
  const auto& k = c.delta.components.at(0);
  double rx = 0.5 * (k.hi[0] - k.lo[0]) + 0.04, ry = 0.5 * (k.hi[1] - k.lo[1]) + 0.04;
  Curve2 tight;
  for (int s = 0; s <= 64; ++s) {
    double t = 2 * kPi * s / 64;
    tight.push_back({k.centroid[0] + rx * std::cos(t), k.centroid[1] + ry * std::sin(t)});
  }
  auto c2 = ejection_certificate(*hs, mp, "q2", {tight}, 0, 32);
  EXPECT_FALSE(c2.curves_clear);
}

// without surgery the saddle q2 stays chain-related to the rest of the basic set
TEST(Ejection, PreSurgeryControlFailsClassCheck) {
  auto hs = make_model("horseshoe3d");
  auto c = ejection_certificate(*hs, horseshoe_partition(), "q2", {circle(0, 0.6, 0.15)}, 0, 16);
  EXPECT_FALSE(c.class_trivial);
  EXPECT_GT(c.far_boxes, 0);
  EXPECT_FALSE(c.certified);
}
