#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phmp/linalg.hpp"

namespace phmp {

struct PeriodicCocycle2 {
  std::vector<Mat2> matrices;

  int period() const { return static_cast<int>(matrices.size()); }
  // A_{n-1} ... A_0
  Mat2 product() const;
};

PeriodicCocycle2 make_cocycle(std::vector<Mat2> ms);

double cocycle_dist(const PeriodicCocycle2& a, const PeriodicCocycle2& b);

struct FlexNode {
  double t = 0;
  PeriodicCocycle2 cocycle;
};

// piecewise linear in every entry between nodes; t runs from -1 to 1
struct FlexPath {
  std::vector<FlexNode> nodes;
  std::optional<PeriodicCocycle2> base;  // designated t = 0 cocycle, node value if absent

  int period() const { return nodes.empty() ? 0 : nodes.front().cocycle.period(); }
  PeriodicCocycle2 at(double t) const;
  // nodes plus one midpoint per segment
  std::vector<FlexNode> refined() const;
};

FlexPath make_flex_path(std::vector<FlexNode> nodes, std::optional<PeriodicCocycle2> base = std::nullopt);
double path_diameter(const FlexPath& p);

enum class FlexCondition { diameter, base, homothety, distinct_contracting, max_small_eigenvalue, eigenvalue_one };
const char* to_string(FlexCondition c);

struct FlexFailure {
  FlexCondition condition;
  int node = -1;  // index into refined grid, -1 for path-level failures
  double t = 0;
  std::string detail;
};

struct FlexReport {
  bool flexible = false;
  double diameter = 0;
  double max_small_eigenvalue = 0;
  std::vector<FlexFailure> failures;

  bool failed(FlexCondition c) const;
};

FlexReport verify_flexible(const FlexPath& p, double epsilon, double tol = 1e-9);

FlexPath build_diagonal_flex_path(double a, double b, int nodes = 201);
// two-segment closed-form path used as the worked example
FlexPath reference_flex_path();

void to_json(nlohmann::json& j, const FlexPath& p);
FlexPath flex_path_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const FlexReport& r);

}  // namespace phmp
