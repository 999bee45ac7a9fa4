#include <algorithm>
#include <queue>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "phmp/chain_recurrence.hpp"
#include "phmp/models.hpp"

using namespace phmp;

namespace {

std::vector<std::vector<std::uint8_t>> reachability(const BoxGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<std::uint8_t>> r(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::queue<int> q;
    auto [b, e] = g.out(static_cast<int>(s));
    for (auto it = b; it != e; ++it)
      if (!r[s][*it]) {
        r[s][*it] = 1;
        q.push(*it);
      }
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      auto [b2, e2] = g.out(u);
      for (auto it = b2; it != e2; ++it)
        if (!r[s][*it]) {
          r[s][*it] = 1;
          q.push(*it);
        }
    }
  }
  return r;
}

// classes from mutual reachability over paths of length >= 1
std::set<std::vector<int>> brute_classes(const BoxGraph& g) {
  auto r = reachability(g);
  const std::size_t n = g.node_count();
  std::vector<int> done(n, 0);
  std::set<std::vector<int>> out;
  for (std::size_t a = 0; a < n; ++a) {
    if (done[a] || !r[a][a]) continue;
    std::vector<int> cls;
    for (std::size_t b = 0; b < n; ++b)
      if (r[a][b] && r[b][a]) {
        cls.push_back(g.nodes[b]);
        done[b] = 1;
      }
    std::sort(cls.begin(), cls.end());
    out.insert(cls);
  }
  return out;
}

BoxGraph graph(const std::string& model, int N, double eps) {
  auto f = make_model(model);
  Box3 box = model == "horseshoe3d" ? Box3{{-1, -1, 0}, {1, 1, 1}} : f->chart().domain;
  return build_box_graph(*f, full_set(make_grid(box, N)), eps);
}

}  // namespace

class SccOracle : public ::testing::TestWithParam<std::string> {};

TEST_P(SccOracle, MatchesBruteForceAtN8) {
  auto g = graph(GetParam(), 8, 0);
  auto md = morse_decomposition(g);
  std::set<std::vector<int>> got(md.classes.begin(), md.classes.end());
  EXPECT_EQ(got, brute_classes(g));
  // order relation agrees with reachability between representatives
  auto r = reachability(g);
  for (std::size_t a = 0; a < md.classes.size(); ++a)
    for (std::size_t b = 0; b < md.classes.size(); ++b) {
      if (a == b) continue;
      int na = g.node_of[md.classes[a][0]], nb = g.node_of[md.classes[b][0]];
      EXPECT_EQ(static_cast<bool>(md.reaches[a][b]), static_cast<bool>(r[na][nb]));
    }
}

INSTANTIATE_TEST_SUITE_P(Models, SccOracle,
                         ::testing::Values("contraction", "two-contractions", "north-south", "solenoid", "horseshoe3d"),
                         [](const auto& info) {
                           std::string s = info.param;
                           std::replace(s.begin(), s.end(), '-', '_');
                           return s;
                         });

// property: enlarging epsilon only adds edges
TEST(BoxGraph, EpsilonMonotone) {
  for (const char* m : {"solenoid", "two-contractions"}) {
    auto g0 = graph(m, 8, 0), g1 = graph(m, 8, 0.05), g2 = graph(m, 8, 0.2);
    for (std::size_t u = 0; u < g0.node_count(); ++u) {
      auto [b, e] = g0.out(static_cast<int>(u));
      for (auto it = b; it != e; ++it) EXPECT_TRUE(g1.has_edge(static_cast<int>(u), *it));
      auto [b1, e1] = g1.out(static_cast<int>(u));
      for (auto it = b1; it != e1; ++it) EXPECT_TRUE(g2.has_edge(static_cast<int>(u), *it));
    }
    EXPECT_LE(g0.edge_count(), g1.edge_count());
    auto c0 = chain_recurrent_set(g0, morse_decomposition(g0)), c2 = chain_recurrent_set(g2, morse_decomposition(g2));
    for (int b : c0.boxes) EXPECT_TRUE(c2.contains(b));
  }
}

class Soundness : public ::testing::TestWithParam<std::string> {};

// every sampled true orbit step follows an edge
TEST_P(Soundness, OrbitStepsFollowEdges) {
  auto f = make_model(GetParam());
  auto g = graph(GetParam(), 16, 0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  const Box3& box = g.grid.box;
  auto sample = [&] {
    return Vec3{box.lo.x + u(rng) * (box.hi.x - box.lo.x), box.lo.y + u(rng) * (box.hi.y - box.lo.y),
                box.lo.z + u(rng) * (box.hi.z - box.lo.z)};
  };
  int tested = 0;
  Vec3 x = sample();
  for (int k = 0; k < 10000; ++k) {
    auto y = f->try_forward(x);
    auto a = g.grid.locate(x);
    if (!y || !a || !g.grid.locate(f->wrap(*y))) {
      x = sample();
      continue;
    }
    Vec3 fy = f->wrap(*y);
    int na = g.node_of[*a], nb = g.node_of[*g.grid.locate(fy)];
    if (nb >= 0) {
      ++tested;
      ASSERT_TRUE(g.has_edge(na, nb)) << "x=" << x.x << "," << x.y << "," << x.z;
    }
    x = k % 25 == 0 ? sample() : fy;
  }
  EXPECT_GT(tested, 5000);
}

INSTANTIATE_TEST_SUITE_P(Models, Soundness, ::testing::Values("contraction", "solenoid", "horseshoe3d", "north-south"),
                         [](const auto& info) {
                           std::string s = info.param;
                           std::replace(s.begin(), s.end(), '-', '_');
                           return s;
                         });

TEST(ChainRecurrence, ContractionShrinks) {
  double prev = 0;
  for (int N : {16, 32, 64}) {
    auto g = graph("contraction", N, 0);
    double d = set_diameter(chain_recurrent_set(g, morse_decomposition(g)));
    if (prev > 0) EXPECT_GE(prev / d, 1.5) << N;
    prev = d;
  }
}

TEST(ChainRecurrence, TwoContractionsHaveTwoAttractors) {
  auto g = graph("two-contractions", 16, 0);
  auto md = morse_decomposition(g);
  EXPECT_EQ(quasi_attractor_candidates(g, md).size(), 2u);
}

TEST(ChainRecurrence, NorthSouthOrder) {
  auto g = graph("north-south", 16, 0);
  auto md = morse_decomposition(g);
  auto q = quasi_attractor_candidates(g, md);
  ASSERT_EQ(q.size(), 1u);
  // the sink class lies at x = 1
  auto sink = class_set(g, md, q[0]);
  EXPECT_GT(set_hull(sink).lo.x, 0.8);
  EXPECT_GE(md.classes.size(), 2u);
}

TEST(ChainRecurrence, SolenoidUniqueQuasiAttractor) {
  auto g = graph("solenoid", 32, 0);
  auto md = morse_decomposition(g);
  auto q = quasi_attractor_candidates(g, md);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_EQ(basin_coverage(g, class_set(g, md, q[0])), 1.0);
  auto ar = attracting_region_boxes(g, class_set(g, md, q[0]));
  EXPECT_TRUE(ar.attracting);
}

TEST(BoxSets, DilateAndRunLength) {
  BoxGrid grid = make_grid(Box3{{0, 0, 0}, {1, 1, 1}}, 4);
  BoxSet s{grid, {grid.index(1, 1, 1)}};
  EXPECT_EQ(dilate(s, 1).size(), 27u);
  EXPECT_EQ(run_length({1, 2, 3, 7, 8, 10}), (std::vector<std::pair<int, int>>{{1, 3}, {7, 2}, {10, 1}}));
}
