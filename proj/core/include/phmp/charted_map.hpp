#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phmp/linalg.hpp"

namespace phmp {

struct Box3 {
  Vec3 lo, hi;

  bool contains(const Vec3& p, double slack = 0) const;
  bool intersects(const Box3& o) const;
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
  double diameter() const { return norm(hi - lo); }
  bool empty() const { return !(lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z); }
  Box3 intersect(const Box3& o) const;
  Box3 grown(double r) const { return {lo - Vec3{r, r, r}, hi + Vec3{r, r, r}}; }
  Box3 grown(const Vec3& r) const { return {lo - r, hi + r}; }
};

struct Chart {
  std::string name;
  Box3 domain;
  std::array<bool, 3> periodic{false, false, false};  // periodic axes have period = domain extent
};

// a flat center-stable disc: the set {p : p[normal_axis] = center[normal_axis],
// dist(p, center) <= radius} in chart coordinates
struct FlatDisc {
  Vec3 center;
  int normal_axis = 2;
  double radius = 1;
};

struct MarkedPoint {
  std::string name;
  Vec3 position;
  int period = 1;
  int stable_dim = 2;
  std::optional<FlatDisc> disc;
};

class ChartedMap {
 public:
  virtual ~ChartedMap() = default;

  virtual std::string name() const = 0;
  virtual const Chart& chart() const = 0;
  // branch domains; every domain point lies in at least one of them
  virtual std::vector<Box3> branch_domains() const { return {chart().domain}; }
  // evaluates the branch formula even on the closed boundary of its domain
  virtual std::optional<Vec3> forward_branch(const Vec3& p, int branch) const;
  virtual std::optional<Vec3> try_forward(const Vec3& p) const = 0;
  virtual std::optional<Vec3> try_inverse(const Vec3& p) const = 0;
  virtual Mat3 jacobian(const Vec3& p) const = 0;
  // componentwise Lipschitz bound valid on `where` (entries bound |d f_i / d x_j|)
  virtual Mat3 lipschitz_matrix(const Box3& where) const = 0;
  virtual std::vector<MarkedPoint> marked_points() const { return {}; }
  // diagonal chart metric; tangent vectors are measured as metric_scale .* v
  virtual Vec3 metric_scale() const { return {1, 1, 1}; }
  // extra sample points where the map has fine structure
  virtual std::vector<Vec3> sample_hints() const { return {}; }
  // false when the map is not C2 within radius of p (finite differences unreliable there)
  virtual bool smooth_near(const Vec3& p, double radius) const;

  Vec3 forward(const Vec3& p) const;
  Vec3 inverse(const Vec3& p) const;
  double lipschitz_bound() const;
  // wraps periodic coordinates into the domain
  Vec3 wrap(const Vec3& p) const;
  // a - b with periodic coordinates taken to the nearest representative
  Vec3 difference(const Vec3& a, const Vec3& b) const;
  bool in_domain(const Vec3& p) const;
  MarkedPoint marked_point(const std::string& name) const;
  // jacobian in metric-normalised coordinates: S J S^-1
  Mat3 metric_jacobian(const Vec3& p) const;
};

using MapPtr = std::shared_ptr<const ChartedMap>;

struct MapCheck {
  int samples = 0;
  int skipped_nonsmooth = 0;
  double max_inverse_error = 0;
  double max_jacobian_rel_error = 0;
  Vec3 worst_jacobian_point;
  double max_lipschitz_ratio = 0;  // sup |f(a)-f(b)| / (L |a-b|)
  bool pass = false;
};

// forward/inverse, finite-difference jacobian (central, step) and Lipschitz checks on seeded samples
MapCheck check_charted_map(const ChartedMap& f, int samples, std::uint64_t seed, double fd_step = 1e-5,
                           const std::vector<Vec3>& extra_points = {});

}  // namespace phmp
