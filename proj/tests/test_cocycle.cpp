#include <set>

#include <nlohmann/json.hpp>

#include <gtest/gtest.h>

#include "phmp/cocycle.hpp"
#include "phmp/error.hpp"

using namespace phmp;

namespace {

// independent diameter: dense sampling of t, operator norm from the 2x2 singular value formula
double brute_diameter(const FlexPath& p, int samples) {
  std::vector<PeriodicCocycle2> pts;
  for (int k = 0; k <= samples; ++k) pts.push_back(p.at(-1 + 2.0 * k / samples));
  double d = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      for (int m = 0; m < p.period(); ++m) {
        Mat2 a = pts[i].matrices[m] - pts[j].matrices[m];
        double s = a(0, 0) * a(0, 0) + a(0, 1) * a(0, 1) + a(1, 0) * a(1, 0) + a(1, 1) * a(1, 1);
        double det = a.det();
        d = std::max(d, std::sqrt(0.5 * (s + std::sqrt(std::max(0.0, s * s - 4 * det * det)))));
      }
  return d;
}

FlexNode node(double t, double a, double b) { return {t, {{Mat2::diag(a, b)}}}; }

std::set<FlexCondition> failed(const FlexReport& r) {
  std::set<FlexCondition> s;
  for (const auto& f : r.failures) s.insert(f.condition);
  return s;
}

}  // namespace

TEST(Flex, ReferencePathThreshold) {
  auto p = reference_flex_path();
  EXPECT_NEAR(path_diameter(p), 0.35, 1e-12);
  EXPECT_NEAR(brute_diameter(p, 400), 0.35, 1e-12);
  EXPECT_TRUE(verify_flexible(p, 0.4).flexible);
  auto r = verify_flexible(p, 0.3);
  EXPECT_FALSE(r.flexible);
  EXPECT_EQ(failed(r), std::set<FlexCondition>{FlexCondition::diameter});
}

TEST(Flex, DiameterAgreesWithBruteForce) {
  for (auto [a, b] : {std::pair{0.2, 0.5}, {0.5, 0.8}, {0.1, 0.9}}) {
    auto p = build_diagonal_flex_path(a, b, 21);
    EXPECT_NEAR(path_diameter(p), brute_diameter(p, 400), 1e-9);
  }
}

TEST(Flex, DiagonalPathIsFlexibleAboveItsDiameter) {
  auto p = build_diagonal_flex_path(0.5, 0.8, 41);
  double d = path_diameter(p);
  EXPECT_TRUE(verify_flexible(p, d + 1e-6).flexible);
  EXPECT_FALSE(verify_flexible(p, d).flexible);
  EXPECT_THROW(build_diagonal_flex_path(0.8, 0.5), Error);
  EXPECT_THROW(build_diagonal_flex_path(0.5, 0.8, 4), Error);
}

struct ToggleCase {
  FlexCondition condition;
  FlexPath path;
  double epsilon;
};

class FlexToggle : public ::testing::TestWithParam<int> {};

TEST_P(FlexToggle, ExactlyOneConditionFails) {
  auto base = PeriodicCocycle2{{Mat2::diag(.5, .8)}};
  std::vector<ToggleCase> cases{
      {FlexCondition::diameter, reference_flex_path(), 0.3},
      {FlexCondition::base, make_flex_path({node(-1, .65, .65), node(0, .5, .8), node(1, .5, 1)}, PeriodicCocycle2{{Mat2::diag(.5, .79)}}), 0.4},
      {FlexCondition::homothety, make_flex_path({node(-1, .6, .65), node(0, .5, .8), node(1, .5, 1)}, base), 0.4},
      {FlexCondition::distinct_contracting, make_flex_path({node(-1, .7, .7), node(0, .7, .7), node(1, .7, 1)}), 0.4},
      {FlexCondition::max_small_eigenvalue, make_flex_path({node(-1, .75, .75), node(0, .7, .8), node(1, 1, 1)}), 0.4},
      {FlexCondition::eigenvalue_one, make_flex_path({node(-1, .65, .65), node(0, .5, .8), node(1, .5, .95)}, base), 0.4},
  };
  const auto& c = cases.at(GetParam());
  auto r = verify_flexible(c.path, c.epsilon);
  EXPECT_FALSE(r.flexible);
  EXPECT_EQ(failed(r), std::set<FlexCondition>{c.condition}) << to_string(c.condition);
  EXPECT_TRUE(r.failed(c.condition));
}

INSTANTIATE_TEST_SUITE_P(AllConditions, FlexToggle, ::testing::Range(0, 6));

TEST(Flex, NonRealEigenvaluesAreNotDistinctContracting) {
  auto rot = [](double t, double s) { return FlexNode{t, {{s * Mat2::rotation(0.3)}}}; };
  auto p = make_flex_path({node(-1, .6, .6), rot(0, 0.6), node(1, .6, 1)});
  EXPECT_TRUE(verify_flexible(p, 10).failed(FlexCondition::distinct_contracting));
}

TEST(Flex, IncompatiblePeriods) {
  PeriodicCocycle2 a{{Mat2::identity()}}, b{{Mat2::identity(), Mat2::identity()}};
  try {
    cocycle_dist(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::incompatible_cocycles);
  }
}

TEST(Flex, JsonRoundTrip) {
  auto p = reference_flex_path();
  nlohmann::json j;
  to_json(j, p);
  auto q = flex_path_from_json(j);
  ASSERT_EQ(q.nodes.size(), p.nodes.size());
  for (double t : {-1.0, -0.3, 0.0, 0.7, 1.0}) EXPECT_EQ(cocycle_dist(p.at(t), q.at(t)), 0.0);
  EXPECT_TRUE(q.base.has_value());
}

TEST(Flex, ProductOrder) {
  // A1 A0 with A0 applied first
  Mat2 a0{{1, 1, 0, 1}}, a1{{2, 0, 0, 1}};
  auto c = make_cocycle({a0, a1});
  EXPECT_EQ(max_abs_entry(c.product() - a1 * a0), 0.0);
}
