#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "phmp/cones.hpp"
#include "phmp/error.hpp"
#include "phmp/models.hpp"

using namespace phmp;

class EveryModel : public ::testing::TestWithParam<std::string> {};

TEST_P(EveryModel, PassesMapCheck) {
  auto f = make_model(GetParam());
  auto c = check_charted_map(*f, 1500, 1, 1e-5, f->sample_hints());
  EXPECT_TRUE(c.pass) << "inverse " << c.max_inverse_error << " jac " << c.max_jacobian_rel_error << " lip "
                      << c.max_lipschitz_ratio;
  EXPECT_GT(c.samples, 100);
}

TEST_P(EveryModel, MarkedPointsArePeriodic) {
  auto f = make_model(GetParam());
  for (const auto& m : f->marked_points()) {
    Vec3 x = m.position;
    for (int k = 0; k < m.period; ++k) x = f->wrap(f->forward(x));
    EXPECT_LT(norm(f->difference(x, m.position)), 1e-12) << m.name;
  }
}

INSTANTIATE_TEST_SUITE_P(Models, EveryModel, ::testing::ValuesIn(model_names()),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (char& c : s)
                             if (c == '-') c = '_';
                           return s;
                         });

TEST(Models, UnknownNameIsUsageError) {
  try {
    make_model("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
  }
}

TEST(Solenoid, ClosedFormImage) {
  SolenoidModel f;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 200; ++k) {
    Vec3 p{0.5 * (u(rng) + 1), 0.7 * u(rng), 0.7 * u(rng)};
    Vec3 q = f.forward(p);
    double a = 2 * kPi * p.x;
    EXPECT_NEAR(q.x, std::fmod(2 * p.x, 1.0), 1e-14);
    EXPECT_NEAR(q.y, 0.25 * p.y + 0.5 * std::cos(a), 1e-14);
    EXPECT_NEAR(q.z, 0.25 * p.z + 0.5 * std::sin(a), 1e-14);
    // the image of the solid torus sits strictly inside it
    EXPECT_LT(std::hypot(q.y, q.z), 0.76);
  }
}

TEST(Solenoid, MetricJacobianIsScaled) {
  SolenoidModel f;
  Vec3 p{0.1, 0.2, -0.3};
  Mat3 j = f.jacobian(p), jm = f.metric_jacobian(p);
  // S J S^-1 with S = diag(2 pi, 1, 1)
  EXPECT_NEAR(jm(0, 0), j(0, 0), 1e-14);
  EXPECT_NEAR(jm(1, 0), j(1, 0) / (2 * kPi), 1e-14);
  EXPECT_NEAR(jm(1, 1), 0.25, 1e-14);
}

TEST(Horseshoe, Branches) {
  HorseshoeModel f;
  auto a = f.forward({0.4, -0.8, 0.2});
  EXPECT_NEAR(a.x, 0.1 - 0.5, 1e-15);
  EXPECT_NEAR(a.y, -0.2, 1e-15);
  EXPECT_NEAR(a.z, 0.6, 1e-15);
  auto b = f.forward({0.4, -0.8, 0.9});
  EXPECT_NEAR(b.x, 0.08 + 0.5, 1e-15);
  EXPECT_NEAR(b.y, -0.4, 1e-15);
  EXPECT_NEAR(b.z, 0.7, 1e-14);
  // the middle band lands below the chart
  auto m = f.try_forward({0, 0, 0.5});
  ASSERT_TRUE(m.has_value());
  EXPECT_NEAR(m->z, -1.5, 1e-15);
  EXPECT_FALSE(f.chart().domain.contains(*m));
}

TEST(Horseshoe, LipschitzBoundsDominateSecants) {
  HorseshoeModel f;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1), z(0, 1);
  for (int k = 0; k < 500; ++k) {
    Vec3 c{u(rng) * 0.9, u(rng) * 0.9, z(rng)};
    Box3 b{c - Vec3{0.05, 0.05, 0.05}, c + Vec3{0.05, 0.05, 0.05}};
    Mat3 l = f.lipschitz_matrix(b);
    Vec3 p{c.x + 0.04 * u(rng), c.y + 0.04 * u(rng), c.z + 0.04 * u(rng)};
    Vec3 q{c.x + 0.04 * u(rng), c.y + 0.04 * u(rng), c.z + 0.04 * u(rng)};
    if (f.branch_of(p) != f.branch_of(q)) continue;
    auto fp = f.try_forward(p), fq = f.try_forward(q);
    if (!fp || !fq) continue;
    Vec3 d = *fp - *fq, e = p - q;
    Vec3 bound = abs_entries(l) * Vec3{std::abs(e.x), std::abs(e.y), std::abs(e.z)};
    EXPECT_LE(std::abs(d.x), bound.x + 1e-12);
    EXPECT_LE(std::abs(d.y), bound.y + 1e-12);
    EXPECT_LE(std::abs(d.z), bound.z + 1e-12);
  }
}

TEST(NorthSouth, SourceAndSink) {
  NorthSouthModel f;
  EXPECT_NEAR(f.forward({0.5, 0, 0}).x, 0.8, 1e-15);
  EXPECT_NEAR(f.jacobian({0, 0, 0})(0, 0), 4, 1e-12);
  EXPECT_NEAR(f.jacobian({1, 0, 0})(0, 0), 0.25, 1e-12);
}
