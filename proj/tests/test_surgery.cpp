#include <random>

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include "phmp/error.hpp"
#include "phmp/models.hpp"
#include "phmp/surgery.hpp"

using namespace phmp;

TEST(Bump, ProfileAndSlope) {
  EXPECT_EQ(bump_rho(0), 1.0);
  EXPECT_EQ(bump_rho(1.0), 0.0);
  double worst = 0;
  for (int k = 0; k <= 10000; ++k) {
    double t = -1 + 2.0 * k / 10000;
    worst = std::max(worst, std::abs(bump_rho_prime(t)));
    EXPECT_GE(bump_rho(t), 0.0);
    EXPECT_LE(bump_rho(t), 1.0);
  }
  EXPECT_LE(worst, kBumpSlopeMax + 1e-12);
}

TEST(Chi, VerifiesOnFineGrid) {
  for (double K : {4.0, 8.0, 16.0}) {
    double a = alpha_max(K, 0.1);
    Chi c = make_chi(K, 0.1, a);
    auto chk = c.verify(10000);
    EXPECT_TRUE(chk.ok()) << K;
    EXPECT_LE(chk.max_deviation, a * K + 1e-12);
    EXPECT_NEAR(c(0.25 * a), K * 0.25 * a, 1e-14);
    double end = 0.5 * (c.kinks().back() + 1);
    EXPECT_NEAR(c(end), end, 1e-14);
    // odd
    EXPECT_NEAR(c(-0.3), -c(0.3), 1e-15);
  }
}

TEST(Chi, RejectsBadParameters) {
  EXPECT_THROW(Chi(0.5, 0.1, 0.01), Error);
  EXPECT_THROW(Chi(8, 1.5, 0.01), Error);
  EXPECT_THROW(Chi(8, 0.1, 0.5), Error);
}

// property: chi' obeys the bounds between grid points too
TEST(Chi, DerivativeBoundsOnRandomPoints) {
  Chi c = make_chi(8, 0.1, alpha_max(8, 0.1));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 20000; ++k) {
    double d = c.derivative(u(rng));
    EXPECT_GE(d, 1 - 0.1 - 1e-12);
    EXPECT_LE(d, 8 + 1e-12);
  }
}

TEST(Hamiltonian, RotationAndShearAtOrigin) {
  Mat2 r = hamiltonian_flow(ModificationFamily::rotation(), 1, {0, 0}).jacobian;
  EXPECT_NEAR(std::abs(r(0, 1)), 1, 1e-6);
  EXPECT_NEAR(r(0, 0), 0, 1e-6);
  Mat2 s = hamiltonian_flow(ModificationFamily::shear(2), 1, {0, 0}).jacobian;
  EXPECT_LT(max_abs_entry(s - Mat2::diag(0.5, 2)), 1e-6);
}

TEST(Hamiltonian, InverseFlow) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (auto fam : {ModificationFamily::rotation(), ModificationFamily::shear(3)}) {
    for (int k = 0; k < 100; ++k) {
      std::array<double, 2> p{u(rng), u(rng)};
      double t = (u(rng) + 0.9) / 1.8;
      auto q = hamiltonian_flow(fam, t, p).point;
      auto back = hamiltonian_flow_inverse(fam, t, q);
      EXPECT_NEAR(back[0], p[0], 1e-9);
      EXPECT_NEAR(back[1], p[1], 1e-9);
    }
  }
}

class GammaHatTest : public ::testing::Test {
 protected:
  GammaHat g{ModificationFamily::rotation(), make_chi(8, 0.1, alpha_max(8, 0.1))};
};

TEST_F(GammaHatTest, IdentityOutsideSupport) {
  Vec3 p{0.99, 0.1, 0.999};
  EXPECT_LT(norm(g.apply(p) - p), 1e-12);
  EXPECT_THROW(g.apply({1.5, 0, 0}), Error);
}

TEST_F(GammaHatTest, InverseAndBlocks) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  const double s = g.alpha() / 2;
  for (int k = 0; k < 3000; ++k) {
    Vec3 p = k % 3 == 0 ? Vec3{s * u(rng) / 1.5, s * u(rng) / 1.5, s * u(rng)} : Vec3{u(rng), u(rng), u(rng)};
    if (std::abs(std::hypot(p.x, p.y) - s) < 1e-6 || std::abs(std::abs(p.z) - s) < 1e-6) continue;
    EXPECT_LT(norm(g.apply_inverse(g.apply(p)) - p), 1e-8);
    EXPECT_LT(max_abs_entry(g.jacobian(p) - g.block_jacobian(p)), 1e-9) << g.region(p);
  }
}

TEST(Surgery, SpecJsonRoundTrip) {
  SurgerySpec s;
  s.target = "q2";
  s.scale = 0.07;
  s.family = ModificationFamily::shear(3);
  s.K = 8;
  nlohmann::json j;
  to_json(j, s);
  auto t = surgery_spec_from_json(j);
  EXPECT_EQ(t.target, "q2");
  EXPECT_EQ(t.scale, 0.07);
  EXPECT_EQ(t.family.kind, ModificationFamily::Kind::shear);
  EXPECT_EQ(t.family.beta, 3);
  EXPECT_EQ(*t.K, 8);
  EXPECT_THROW(surgery_spec_from_json(nlohmann::json{{"target", "q2"}}), Error);
}

TEST(Surgery, ShearAtQ2ChangesIndex) {
  SurgerySpec s;
  s.target = "q2";
  s.family = ModificationFamily::shear(3);
  auto g = apply_surgery(make_model("horseshoe3d"), s);
  auto q = g->marked_point("q2");
  EXPECT_EQ(q.stable_dim, 1);
  Mat3 j = g->jacobian(q.position);
  // oracle: branch-2 linear part diag(1/5, 1/2) composed with the shear diag(1/3, 3)
  EXPECT_NEAR(j(0, 0), 1.0 / 15, 1e-9);
  EXPECT_NEAR(j(1, 1), 1.5, 1e-9);
  EXPECT_NEAR(j(1, 0), 0, 1e-9);
  EXPECT_NEAR(j(2, 0), 0, 1e-9);
  // the map away from the support is untouched
  auto base = make_model("horseshoe3d");
  Vec3 far{-0.5, 0.3, 0.9};
  EXPECT_LT(norm(g->forward(far) - base->forward(far)), 1e-15);
  // finite differences need a step well below the kernel's feature size eps * alpha
  double h = 1e-4 * g->homothety() * g->kernel().alpha();
  auto c = check_charted_map(*g, 400, 3, h, g->sample_hints());
  EXPECT_TRUE(c.pass) << c.max_inverse_error << " " << c.max_jacobian_rel_error << " " << c.max_lipschitz_ratio;
}

TEST(Surgery, UnknownTarget) {
  SurgerySpec s;
  s.target = "nowhere";
  try {
    apply_surgery(make_model("horseshoe3d"), s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_spec);
  }
}
