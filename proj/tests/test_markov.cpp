#include <random>

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include "phmp/error.hpp"
#include "phmp/markov.hpp"
#include "phmp/models.hpp"

using namespace phmp;

namespace {

// interval-cover oracle for theta -> 2 theta: a_ij counts the lifts of I_j into I_i
std::vector<std::vector<int>> doubling_cover(const MarkovPartition& mp) {
  const std::size_t k = mp.size();
  std::vector<std::vector<int>> a(k, std::vector<int>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const Box3& bi = mp.rectangles[i].box;
      const Box3& bj = mp.rectangles[j].box;
      for (int branch = 0; branch < 2; ++branch) {
        bool whole = true;
        for (int s = 0; s <= 1000; ++s) {
          double theta = bj.lo.x + (bj.hi.x - bj.lo.x) * s / 1000.0;
          double pre = (theta + branch) / 2;
          whole = whole && pre >= bi.lo.x - 1e-12 && pre <= bi.hi.x + 1e-12;
        }
        a[i][j] += whole;
      }
    }
  return a;
}

using Matrix = std::vector<std::vector<int>>;

Matrix bool_power(const Matrix& a, int n) {
  Matrix p = a;
  for (int s = 1; s < n; ++s) {
    Matrix q(a.size(), std::vector<int>(a.size(), 0));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t l = 0; l < a.size(); ++l) q[i][j] |= (p[i][l] > 0) && (a[l][j] > 0);
    p = q;
  }
  return p;
}

}  // namespace

TEST(Solenoid, PartitionMatchesIntervalCover) {
  auto f = make_model("solenoid");
  auto mp = solenoid_partition();
  RasterOptions ro;
  ro.resolution = 64;
  auto r = verify_partition(*f, mp, ro);
  EXPECT_TRUE(r.pass) << (r.violations.empty() ? r.inconclusive_reason : r.violations.front());
  EXPECT_FALSE(r.inconclusive);
  EXPECT_EQ(r.incidence, doubling_cover(mp));
  EXPECT_EQ(r.incidence, (Matrix{{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}}));
  for (const auto& fc : r.filtration) EXPECT_TRUE(fc.pass) << fc.what;
  auto mix = is_mixing(r.incidence, 8);
  EXPECT_TRUE(mix.verdict);
  EXPECT_EQ(mix.exponent, 2);
}

TEST(Horseshoe, PartitionHasTwoStrips) {
  auto f = make_model("horseshoe3d");
  RasterOptions ro;
  ro.resolution = 32;
  auto r = verify_partition(*f, horseshoe_partition(), ro);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.incidence, (Matrix{{2}}));
}

TEST(Identity, CubeIsNotMarkov) {
  auto f = make_model("identity");
  RasterOptions ro;
  ro.resolution = 32;
  ro.check_doubling = false;
  auto r = verify_partition(*f, identity_partition(), ro);
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.violations.empty());
}

// property: the power verdicts agree with brute-force boolean powers
TEST(Incidence, PowerVerdictsMatchBruteForce) {
  std::mt19937_64 rng(12);
  std::bernoulli_distribution coin(0.35);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t k = 2 + trial % 5;
    Matrix a(k, std::vector<int>(k));
    for (auto& row : a)
      for (int& x : row) x = coin(rng) ? 1 + static_cast<int>(rng() % 2) : 0;
    int want_mix = 0;
    for (int n = 1; n <= 12 && !want_mix; ++n) {
      auto p = bool_power(a, n);
      bool all = true;
      for (auto& row : p)
        for (int x : row) all = all && x;
      if (all) want_mix = n;
    }
    auto mix = is_mixing(a, 12);
    EXPECT_EQ(mix.verdict, want_mix > 0);
    EXPECT_EQ(mix.exponent, want_mix);

    Matrix seen(k, std::vector<int>(k, 0));
    for (int n = 1; n <= 12; ++n) {
      auto p = bool_power(a, n);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) seen[i][j] |= p[i][j];
    }
    bool want_tr = true;
    for (auto& row : seen)
      for (int x : row) want_tr = want_tr && x;
    EXPECT_EQ(is_transitive(a, 12).verdict, want_tr);
  }
  EXPECT_THROW(is_mixing({{1}}, 0), Error);
}

TEST(Partition, JsonRoundTrip) {
  for (const auto& mp : {solenoid_partition(), horseshoe_partition()}) {
    auto j = to_json(mp);
    auto back = partition_from_json(j);
    EXPECT_EQ(to_json(back), j);
  }
  try {
    partition_from_json(nlohmann::json{{"type", "weird"}, {"rectangles", nlohmann::json::array()}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_spec);
  }
}

TEST(Partition, ValidateRejectsBadAxis) {
  auto mp = horseshoe_partition();
  mp.rectangles[0].vertical_axis = 5;
  EXPECT_THROW(validate(mp), Error);
}

TEST(Refine, HorseshoeSplitsIntoFour) {
  auto f = make_model("horseshoe3d");
  auto fine = refine(*f, horseshoe_partition(), -1, 1, 32);
  ASSERT_EQ(fine.size(), 4u);
  auto m = incidence_matrix(*f, fine, 32, false);
  EXPECT_EQ(m.a, (Matrix{{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}}));
  // refined partitions survive serialisation, parent included
  auto back = partition_from_json(to_json(fine));
  EXPECT_EQ(back.size(), 4u);
  ASSERT_TRUE(back.parent);
  EXPECT_EQ(back.parent->size(), 1u);
}

TEST(Refine, MembershipFollowsItinerary) {
  auto f = make_model("solenoid");
  auto mp = solenoid_partition();
  auto fine = refine(*f, mp, 0, 1, 32);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  int checked = 0;
  for (int k = 0; k < 2000; ++k) {
    Vec3 x = f->forward({0.5 * (u(rng) + 1), 0.9 * u(rng), 0.9 * u(rng)});  // lands near the attractor
    for (std::size_t i = 0; i < fine.size(); ++i) {
      if (!member(*f, fine, static_cast<int>(i), x)) continue;
      ++checked;
      const auto& r = fine.rectangles[i];
      for (std::size_t s = 0; s < r.itinerary.size(); ++s) {
        Vec3 y = x;
        int step = r.itinerary_start + static_cast<int>(s);
        for (int t = 0; t < step; ++t) y = f->wrap(f->inverse(y));
        for (int t = 0; t < -step; ++t) y = f->wrap(f->forward(y));
        EXPECT_TRUE(in_rectangle(*f, mp.rectangles[r.itinerary[s]], y, 1e-9));
      }
    }
  }
  EXPECT_GT(checked, 500);
}

TEST(Refine, RejectsWideWindows) {
  auto f = make_model("solenoid");
  EXPECT_THROW(refine(*f, solenoid_partition(), 1, 2, 32), Error);
  EXPECT_THROW(refine(*f, solenoid_partition(), 0, 9, 32), Error);
}

TEST(Growth, HorseshoeCrossingsDouble) {
  auto f = make_model("horseshoe3d");
  auto mp = horseshoe_partition();
  Polyline seg{{0, 0, 0}, {0, 0, 1}};
  auto g = vertical_segment_growth(*f, mp, seg, 6);
  EXPECT_EQ(g.n0, 0);
  ASSERT_EQ(g.crossings.size(), 7u);
  for (int n = 0; n <= 6; ++n) EXPECT_EQ(g.crossings[n][0], 1 << n);
  EXPECT_TRUE(g.monotone);
}

TEST(Growth, SolenoidQuarterTurn) {
  auto f = make_model("solenoid");
  Polyline seg;
  for (int k = 0; k <= 8; ++k) seg.push_back({0.25 * k / 8, 0, 0});
  auto g = vertical_segment_growth(*f, solenoid_partition(), seg, 5);
  EXPECT_EQ(g.n0, 2);
  EXPECT_TRUE(g.monotone);
}

TEST(Growth, RejectsNonVerticalSegment) {
  auto f = make_model("horseshoe3d");
  Polyline seg{{-0.5, 0, 0}, {0.5, 0, 0.2}};
  try {
    vertical_segment_growth(*f, horseshoe_partition(), seg, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}
