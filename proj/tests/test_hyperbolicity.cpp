#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include "phmp/error.hpp"
#include "phmp/hyperbolicity.hpp"
#include "phmp/models.hpp"
#include "phmp/surgery.hpp"

using namespace phmp;

namespace {

const Box3 kCore{{-1, -1, 0}, {1, 1, 1}};

ConeCertificate horseshoe_cones(double aperture_deg, double floor, double margin_deg = 0.5) {
  auto f = make_model("horseshoe3d");
  CertifyOptions o;
  o.expansion_floor = floor;
  o.margin = deg(margin_deg);
  return certify_unstable_cones(*f, full_set(make_grid(kCore, 8)), named_cone_field("vertical-cone", deg(aperture_deg)), o);
}

}  // namespace

TEST(Cones, SolenoidThetaCone) {
  auto f = make_model("solenoid");
  CertifyOptions o;
  o.expansion_floor = 1.5;
  auto c = certify_unstable_cones(*f, full_set(make_grid(f->chart(), 8)), named_cone_field("solenoid-theta-cone", deg(30)), o);
  EXPECT_TRUE(c.pass);
  EXPECT_GE(c.min_expansion, 1.5);
  EXPECT_GT(c.min_slack, deg(0.5));
  EXPECT_EQ(c.escaped, 0);
}

TEST(Cones, HorseshoeAndWideCone) {
  auto ok = horseshoe_cones(30, 2.0);
  EXPECT_TRUE(ok.pass);
  EXPECT_GE(ok.min_expansion, 2.0);
  auto wide = horseshoe_cones(80, 2.0);
  EXPECT_FALSE(wide.pass);
  EXPECT_GT(norm(wide.witness), 0);
  // the witness really is expanded by less than the floor
  auto f = make_model("horseshoe3d");
  Vec3 w = normalized(wide.witness);
  EXPECT_LT(norm(f->metric_jacobian(wide.worst_expansion_point) * w), 2.0);
}

// property: raising the margin can only turn a pass into a fail, and min_slack does not depend on it
TEST(Cones, MarginMonotonicity) {
  bool failed_before = false;
  double slack = -1;
  for (double m : {0.1, 1.0, 5.0, 10.0, 20.0, 40.0}) {
    auto c = horseshoe_cones(30, 1.01, m);
    if (slack < 0) slack = c.min_slack;
    EXPECT_NEAR(c.min_slack, slack, 1e-15);
    EXPECT_EQ(c.pass, c.min_slack >= deg(m));
    if (failed_before) EXPECT_FALSE(c.pass) << m;
    failed_before = failed_before || !c.pass;
  }
  EXPECT_TRUE(failed_before);
}

TEST(Cones, IdentityIsNotDominated) {
  auto f = make_model("identity");
  auto c = certify_dominated(*f, full_set(make_grid(f->chart(), 4)), named_cone_field("vertical-cone", deg(30)));
  EXPECT_FALSE(c.pass);
}

TEST(Cones, TabulatedFieldChecksJumps) {
  BoxGrid g = make_grid(kCore, 2);
  std::vector<Cone> ok(g.size(), circular_cone({0, 0, 1}, deg(30)));
  EXPECT_NO_THROW(tabulated_cone_field("t", g, ok));
  auto bad = ok;
  bad[0] = circular_cone({1, 0, 0}, deg(30));
  EXPECT_THROW(tabulated_cone_field("t", g, bad), Error);
  std::vector<Cone> short_list(3, circular_cone({0, 0, 1}, deg(30)));
  EXPECT_THROW(tabulated_cone_field("t", g, short_list), Error);
  auto f = make_model("horseshoe3d");
  auto field = tabulated_cone_field("t", g, ok);
  try {
    field.at(*f, {0, 0, 5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::coverage);
  }
}

TEST(NormalCocycle, Determinants) {
  auto sol = make_model("solenoid");
  auto hs = make_model("horseshoe3d");
  auto d = normal_cocycle_step(*sol, named_plane_field("fiber-plane"), named_cone_field("solenoid-theta-cone", deg(30)), {0.3, 0.1, -0.2});
  EXPECT_NEAR(std::abs(d.det), 1.0 / 16, 1e-12);
  auto hp = named_plane_field("xy-plane");
  auto hc = named_cone_field("vertical-cone", deg(30));
  EXPECT_NEAR(std::abs(normal_cocycle_step(*hs, hp, hc, {0.1, 0.2, 0.1}).det), 1.0 / 16, 1e-12);
  EXPECT_NEAR(std::abs(normal_cocycle_step(*hs, hp, hc, {0.1, 0.2, 0.9}).det), 0.1, 1e-12);
}

// oracle: on a closed orbit the product of one-step determinants is the xy determinant of the
// period jacobian (the xy plane and e_z are invariant for the horseshoe)
TEST(NormalCocycle, ClosedOrbitProduct) {
  auto hs = make_model("horseshoe3d");
  Vec3 x0{8.0 / 19, 0, 0.25};
  Vec3 x1 = hs->forward(x0);
  ASSERT_LT(norm(hs->forward(x1) - x0), 1e-14);
  auto hp = named_plane_field("xy-plane");
  auto hc = named_cone_field("vertical-cone", deg(30));
  double prod = normal_cocycle_step(*hs, hp, hc, x0).det * normal_cocycle_step(*hs, hp, hc, x1).det;
  Mat3 j = hs->jacobian(x1) * hs->jacobian(x0);
  EXPECT_NEAR(std::abs(prod), std::abs(j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0)), 1e-15);
  EXPECT_NEAR(std::abs(prod), 1.0 / 160, 1e-15);
}

TEST(NormalCocycle, CompositionIdentity) { EXPECT_LT(composition_identity_error(0, 1000), 1e-10); }

TEST(Volume, PassesAndNeedsCertificate) {
  auto hs = make_model("horseshoe3d");
  auto region = full_set(make_grid(kCore, 8));
  auto cf = named_cone_field("vertical-cone", deg(30));
  CertifyOptions o;
  o.expansion_floor = 1.5;
  auto u = certify_unstable_cones(*hs, region, cf, o);
  ASSERT_TRUE(u.pass);
  VolumeOptions vo;
  vo.orbits = 64;
  auto v = certify_volume_hyperbolic(*hs, region, named_plane_field("xy-plane"), cf, u, vo);
  EXPECT_TRUE(v.pass);
  EXPECT_NEAR(v.max_det, 0.1, 1e-12);
  vo.lambda_bar = 0.09;
  EXPECT_FALSE(certify_volume_hyperbolic(*hs, region, named_plane_field("xy-plane"), cf, u, vo).pass);
  auto other = named_cone_field("axis-x", deg(30));
  EXPECT_THROW(certify_volume_hyperbolic(*hs, region, named_plane_field("xy-plane"), other, u, vo), Error);
}

TEST(Volume, SeededRunsAreIdentical) {
  auto sol = make_model("solenoid");
  auto region = full_set(make_grid(sol->chart(), 8));
  auto cf = named_cone_field("solenoid-theta-cone", deg(30));
  auto u = certify_unstable_cones(*sol, region, cf);
  VolumeOptions vo;
  vo.orbits = 32;
  vo.seed = 42;
  auto a = certify_volume_hyperbolic(*sol, region, named_plane_field("fiber-plane"), cf, u, vo);
  auto b = certify_volume_hyperbolic(*sol, region, named_plane_field("fiber-plane"), cf, u, vo);
  EXPECT_EQ(to_json(a), to_json(b));
}

TEST(LargeStable, FixedPoints) {
  auto hs = make_model("horseshoe3d");
  EXPECT_TRUE(check_large_stable_manifold(*hs, horseshoe_partition(), "p").pass);
  EXPECT_TRUE(check_large_stable_manifold(*hs, horseshoe_partition(), "q2").pass);
  auto sol = make_model("solenoid");
  EXPECT_TRUE(check_large_stable_manifold(*sol, solenoid_partition(), "fixed").pass);
  EXPECT_THROW(check_large_stable_manifold(*hs, horseshoe_partition(), "missing"), Error);
}

// the shear surgery makes the weak direction at q2 expanding, so disc points along y escape
TEST(LargeStable, FailsAfterIndexChange) {
  SurgerySpec s;
  s.target = "q2";
  s.scale = 0.05;
  s.family = ModificationFamily::shear(3);
  auto g = apply_surgery(make_model("horseshoe3d"), s);
  auto v = check_large_stable_manifold(*g, horseshoe_partition(), "q2");
  EXPECT_FALSE(v.pass);
  EXPECT_GT(v.escaped + v.unconverged, 0);
}
