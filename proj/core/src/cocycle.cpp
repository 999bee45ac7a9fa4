#include "phmp/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

#include "phmp/error.hpp"

namespace phmp {

Mat2 PeriodicCocycle2::product() const {
  Mat2 p = Mat2::identity();
  for (const Mat2& m : matrices) p = m * p;
  return p;
}

PeriodicCocycle2 make_cocycle(std::vector<Mat2> ms) {
  if (ms.empty()) throw Error(ErrorKind::invalid_parameters, "cocycle needs period >= 1");
  for (const Mat2& m : ms)
    if (std::abs(m.det()) <= 1e-12) throw Error(ErrorKind::invalid_parameters, "cocycle matrix not invertible");
  return {std::move(ms)};
}

double cocycle_dist(const PeriodicCocycle2& a, const PeriodicCocycle2& b) {
  if (a.period() != b.period())
    throw Error(ErrorKind::incompatible_cocycles, "periods " + std::to_string(a.period()) + " and " +
                                                      std::to_string(b.period()) + " differ");
  double d = 0;
  for (int i = 0; i < a.period(); ++i) d = std::max(d, operator_norm(a.matrices[i] - b.matrices[i]));
  return d;
}

namespace {

PeriodicCocycle2 lerp(const PeriodicCocycle2& a, const PeriodicCocycle2& b, double s) {
  PeriodicCocycle2 r;
  r.matrices.resize(a.matrices.size());
  for (size_t i = 0; i < a.matrices.size(); ++i)
    r.matrices[i] = (1 - s) * a.matrices[i] + s * b.matrices[i];
  return r;
}

}  // namespace

PeriodicCocycle2 FlexPath::at(double t) const {
  if (t <= nodes.front().t) return nodes.front().cocycle;
  if (t >= nodes.back().t) return nodes.back().cocycle;
  auto it = std::upper_bound(nodes.begin(), nodes.end(), t, [](double v, const FlexNode& n) { return v < n.t; });
  const FlexNode& hi = *it;
  const FlexNode& lo = *(it - 1);
  return lerp(lo.cocycle, hi.cocycle, (t - lo.t) / (hi.t - lo.t));
}

std::vector<FlexNode> FlexPath::refined() const {
  std::vector<FlexNode> out;
  out.reserve(2 * nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    out.push_back(nodes[i]);
    if (i + 1 < nodes.size()) {
      double tm = 0.5 * (nodes[i].t + nodes[i + 1].t);
      out.push_back({tm, lerp(nodes[i].cocycle, nodes[i + 1].cocycle, 0.5)});
    }
  }
  return out;
}

FlexPath make_flex_path(std::vector<FlexNode> nodes, std::optional<PeriodicCocycle2> base) {
  if (nodes.size() < 2) throw Error(ErrorKind::invalid_parameters, "flex path needs at least two nodes");
  int n = nodes.front().cocycle.period();
  bool has_zero = false;
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].cocycle.period() != n || n < 1)
      throw Error(ErrorKind::incompatible_cocycles, "flex path nodes must share one period");
    if (i > 0 && !(nodes[i].t > nodes[i - 1].t))
      throw Error(ErrorKind::invalid_parameters, "flex path grid must be increasing");
    if (nodes[i].t == 0.0) has_zero = true;
  }
  if (nodes.front().t != -1.0 || nodes.back().t != 1.0)
    throw Error(ErrorKind::invalid_parameters, "flex path grid must run from -1 to 1");
  if (!has_zero) throw Error(ErrorKind::invalid_parameters, "flex path grid must contain t = 0");
  if (base && base->period() != n) throw Error(ErrorKind::incompatible_cocycles, "base period mismatch");
  return {std::move(nodes), std::move(base)};
}

double path_diameter(const FlexPath& p) {
  // dist along a pair of segments is convex in the parameters, so the refined nodes suffice
  auto grid = p.refined();
  double d = 0;
  for (size_t i = 0; i < grid.size(); ++i)
    for (size_t j = i + 1; j < grid.size(); ++j) d = std::max(d, cocycle_dist(grid[i].cocycle, grid[j].cocycle));
  return d;
}

const char* to_string(FlexCondition c) {
  switch (c) {
    case FlexCondition::diameter: return "diameter";
    case FlexCondition::base: return "base";
    case FlexCondition::homothety: return "homothety";
    case FlexCondition::distinct_contracting: return "distinct-contracting";
    case FlexCondition::max_small_eigenvalue: return "max-small-eigenvalue";
    case FlexCondition::eigenvalue_one: return "eigenvalue-one";
  }
  return "?";
}

bool FlexReport::failed(FlexCondition c) const {
  return std::any_of(failures.begin(), failures.end(), [c](const FlexFailure& f) { return f.condition == c; });
}

FlexReport verify_flexible(const FlexPath& p, double epsilon, double tol) {
  if (!(tol > 0)) throw Error(ErrorKind::invalid_parameters, "tol must be positive");
  FlexReport rep;
  auto grid = p.refined();
  auto fail = [&](FlexCondition c, int node, double t, std::string msg) {
    rep.failures.push_back({c, node, t, std::move(msg)});
  };

  rep.diameter = path_diameter(p);
  if (!(rep.diameter < epsilon)) {
    std::ostringstream os;
    os << "diameter " << rep.diameter << " >= " << epsilon;
    fail(FlexCondition::diameter, -1, 0, os.str());
  }

  auto zero = std::find_if(grid.begin(), grid.end(), [](const FlexNode& n) { return n.t == 0.0; });
  if (p.base && zero != grid.end()) {
    for (int i = 0; i < p.base->period(); ++i)
      if (max_abs_entry(zero->cocycle.matrices[i] - p.base->matrices[i]) > tol) {
        fail(FlexCondition::base, int(zero - grid.begin()), 0, "t = 0 cocycle differs from base");
        break;
      }
  }

  {
    Mat2 m = grid.front().cocycle.product();
    bool ok = std::abs(m(0, 1)) < tol && std::abs(m(1, 0)) < tol && m(0, 0) > 0 &&
              std::abs(m(0, 0) - m(1, 1)) <= tol * std::max(1.0, std::abs(m(0, 0)));
    if (!ok) fail(FlexCondition::homothety, 0, -1.0, "product at t = -1 is not a positive homothety");
  }

  rep.max_small_eigenvalue = -1e300;
  for (size_t k = 0; k < grid.size(); ++k) {
    Eigen2 e = eigenvalues2(grid[k].cocycle.product());
    double small = e.non_real ? std::abs(e.first) : std::min(e.first.real(), e.second.real());
    rep.max_small_eigenvalue = std::max(rep.max_small_eigenvalue, small);
    double t = grid[k].t;
    if (t > -1.0 && t < 1.0) {
      double l1 = e.first.real(), l2 = e.second.real();
      bool ok = !e.non_real && l1 > 0 && l2 > 0 && l1 < 1 && l2 < 1 && std::abs(l2 - l1) > tol;
      if (!ok) {
        std::ostringstream os;
        os << "eigenvalues " << e.first << ", " << e.second;
        fail(FlexCondition::distinct_contracting, int(k), t, os.str());
      }
    }
  }
  if (!(rep.max_small_eigenvalue < 1 - tol)) {
    std::ostringstream os;
    os << "max smaller eigenvalue " << rep.max_small_eigenvalue;
    fail(FlexCondition::max_small_eigenvalue, -1, 0, os.str());
  }

  {
    Eigen2 e = eigenvalues2(grid.back().cocycle.product());
    bool ok = !e.non_real && (std::abs(e.first.real() - 1) <= tol || std::abs(e.second.real() - 1) <= tol);
    if (!ok) fail(FlexCondition::eigenvalue_one, int(grid.size()) - 1, 1.0, "no eigenvalue 1 at t = 1");
  }

  std::stable_sort(rep.failures.begin(), rep.failures.end(),
                   [](const FlexFailure& a, const FlexFailure& b) { return a.node < b.node; });
  rep.flexible = rep.failures.empty();
  return rep;
}

FlexPath build_diagonal_flex_path(double a, double b, int count) {
  if (!(a > 0 && a < 1 && b > 0 && b < 1) || !(a < b))
    throw Error(ErrorKind::invalid_parameters, "need 0 < a < b < 1");
  if (count < 3 || count % 2 == 0) throw Error(ErrorKind::invalid_parameters, "node count must be odd and >= 3");
  double h = 0.5 * (a + b);
  std::vector<FlexNode> nodes;
  int half = count / 2;
  for (int i = 0; i < count; ++i) {
    // exact -1, 0, 1 at the ends and middle
    double t = i == half ? 0.0 : double(i - half) / half;
    Mat2 m;
    if (t <= 0) {
      double s = -t;
      m = Mat2::diag(a + s * (h - a), b + s * (h - b));
    } else {
      m = Mat2::diag(a, b + t * (1 - b));
    }
    nodes.push_back({t, {{m}}});
  }
  return make_flex_path(std::move(nodes), PeriodicCocycle2{{Mat2::diag(a, b)}});
}

FlexPath reference_flex_path() {
  auto node = [](double t, double p, double q) { return FlexNode{t, {{Mat2::diag(p, q)}}}; };
  return make_flex_path({node(-1, 0.65, 0.65), node(0, 0.5, 0.8), node(1, 0.5, 1.0)},
                        PeriodicCocycle2{{Mat2::diag(0.5, 0.8)}});
}

void to_json(nlohmann::json& j, const FlexPath& p) {
  auto mats = [](const PeriodicCocycle2& c) {
    nlohmann::json arr = nlohmann::json::array();
    for (const Mat2& m : c.matrices) arr.push_back({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}});
    return arr;
  };
  j = nlohmann::json::object();
  j["period"] = p.period();
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : p.nodes) j["nodes"].push_back({{"t", n.t}, {"matrices", mats(n.cocycle)}});
  if (p.base) j["base"] = mats(*p.base);
}

FlexPath flex_path_from_json(const nlohmann::json& j) {
  auto mats = [](const nlohmann::json& arr) {
    std::vector<Mat2> out;
    for (const auto& m : arr)
      out.push_back({{m.at(0).at(0).get<double>(), m.at(0).at(1).get<double>(), m.at(1).at(0).get<double>(),
                      m.at(1).at(1).get<double>()}});
    return make_cocycle(std::move(out));
  };
  try {
    std::vector<FlexNode> nodes;
    for (const auto& n : j.at("nodes")) nodes.push_back({n.at("t").get<double>(), mats(n.at("matrices"))});
    std::optional<PeriodicCocycle2> base;
    if (j.contains("base")) base = mats(j.at("base"));
    FlexPath p = make_flex_path(std::move(nodes), std::move(base));
    if (j.contains("period") && j.at("period").get<int>() != p.period())
      throw Error(ErrorKind::incompatible_cocycles, "declared period does not match matrices");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_parameters, std::string("bad flex path json: ") + e.what());
  }
}

void to_json(nlohmann::json& j, const FlexReport& r) {
  j = {{"flexible", r.flexible}, {"diameter", r.diameter}, {"max_small_eigenvalue", r.max_small_eigenvalue}};
  j["failures"] = nlohmann::json::array();
  for (const auto& f : r.failures)
    j["failures"].push_back({{"condition", to_string(f.condition)}, {"node", f.node}, {"t", f.t}, {"detail", f.detail}});
}

}  // namespace phmp
