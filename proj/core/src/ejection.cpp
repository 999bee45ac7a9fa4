#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "phmp/chain_recurrence.hpp"
#include "phmp/ejection.hpp"
#include "phmp/error.hpp"
#include "phmp/parallel.hpp"

namespace phmp {

Vec3 DiscRaster::lift(const Point2& q) const {
  Vec3 p = disc.center;
  p[axes[0]] = q[0];
  p[axes[1]] = q[1];
  return p;
}

namespace {

struct Marked {
  MarkedPoint m;
  std::vector<Vec3> orbit;
};

Marked periodic_marker(const ChartedMap& f, const std::string& point) {
  Marked r{f.marked_point(point), {}};
  if (!r.m.disc) throw Error(ErrorKind::invalid_marker, "marked point " + point + " has no flat disc");
  if (r.m.period < 1) throw Error(ErrorKind::invalid_marker, "marked point " + point + " has no period");
  Vec3 x = r.m.position;
  for (int k = 0; k < r.m.period; ++k) {
    r.orbit.push_back(x);
    auto y = f.try_forward(x);
    if (!y) throw Error(ErrorKind::invalid_marker, "orbit of " + point + " leaves the chart");
    x = f.wrap(*y);
  }
  if (norm(f.difference(x, r.m.position)) > 1e-9)
    throw Error(ErrorKind::invalid_marker, point + " is not periodic with period " + std::to_string(r.m.period));
  return r;
}

std::optional<Vec3> pull_back(const ChartedMap& f, Vec3 q, int steps) {
  for (int s = 0; s < steps; ++s) {
    auto p = f.try_inverse(q);
    if (!p) return std::nullopt;
    q = f.wrap(*p);
  }
  return q;
}

bool in_disc(const ChartedMap& f, const FlatDisc& d, const std::array<int, 2>& ax, const Vec3& p, double tol) {
  Vec3 u = f.difference(p, d.center);
  if (std::abs(u[d.normal_axis]) > tol) return false;
  return std::hypot(u[ax[0]], u[ax[1]]) <= d.radius + tol;
}

// 1 annulus, 2 image of the disc, 3 obstacle; 0 outside the disc
std::uint8_t classify(const ChartedMap& f, const MarkovPartition& mp, const Marked& mk, const std::array<int, 2>& ax,
                      const Vec3& q) {
  const FlatDisc& d = *mk.m.disc;
  if (std::hypot(q[ax[0]] - d.center[ax[0]], q[ax[1]] - d.center[ax[1]]) > d.radius) return 0;
  auto p = pull_back(f, q, mk.m.period);
  if (!p || !in_family(f, mp, *p)) return 1;
  return in_disc(f, d, ax, *p, 1e-9) ? 2 : 3;
}

DiscRaster rasterize(const ChartedMap& f, const MarkovPartition& mp, const Marked& mk, int N) {
  DiscRaster r;
  r.disc = *mk.m.disc;
  int k = r.disc.normal_axis;
  r.axes = k == 0 ? std::array{1, 2} : (k == 1 ? std::array{0, 2} : std::array{0, 1});
  r.n = N;
  r.h = 2 * r.disc.radius / N;
  r.origin = {r.disc.center[r.axes[0]] - r.disc.radius, r.disc.center[r.axes[1]] - r.disc.radius};
  r.label.assign(static_cast<std::size_t>(N) * N, 0);
  parallel_for(static_cast<std::size_t>(N) * N, [&](std::size_t c) {
    int i = static_cast<int>(c / N), j = static_cast<int>(c % N);
    r.label[c] = classify(f, mp, mk, r.axes, r.lift(r.center(i, j)));
  });
  return r;
}

std::vector<DeltaComponent> components(const DiscRaster& r) {
  const int N = r.n;
  std::vector<std::uint8_t> seen(r.label.size(), 0);
  std::vector<DeltaComponent> out;
  std::vector<int> stack;
  for (int s = 0; s < N * N; ++s) {
    if (seen[s] || r.label[s] != 3) continue;
    DeltaComponent c;
    c.lo = {1e300, 1e300};
    c.hi = {-1e300, -1e300};
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      int i = u / N, j = u % N;
      ++c.cells;
      Point2 q = r.center(i, j);
      c.centroid[0] += q[0];
      c.centroid[1] += q[1];
      c.lo = {std::min(c.lo[0], q[0] - r.h / 2), std::min(c.lo[1], q[1] - r.h / 2)};
      c.hi = {std::max(c.hi[0], q[0] + r.h / 2), std::max(c.hi[1], q[1] + r.h / 2)};
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        int a = i + di[d], b = j + dj[d];
        if (a < 0 || b < 0 || a >= N || b >= N) continue;
        int w = a * N + b;
        if (!seen[w] && r.label[w] == 3) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
    c.area = c.cells * r.h * r.h;
    c.centroid = {c.centroid[0] / c.cells, c.centroid[1] / c.cells};
    out.push_back(c);
  }
  return out;
}

}  // namespace

DeltaD delta_d_components(const ChartedMap& f, const MarkovPartition& mp, const std::string& point, int resolution,
                          bool check_doubling) {
  if (resolution < 8) throw Error(ErrorKind::invalid_parameters, "disc resolution must be >= 8");
  validate(mp);
  Marked mk = periodic_marker(f, point);
  DeltaD d;
  d.point = point;
  d.period = mk.m.period;
  d.resolution = resolution;
  d.raster = rasterize(f, mp, mk, resolution);
  d.components = components(d.raster);
  if (check_doubling) {
    d.doubled_count = static_cast<int>(components(rasterize(f, mp, mk, 2 * resolution)).size());
    if (d.doubled_count != static_cast<int>(d.components.size())) {
      d.inconclusive = true;
      d.reason = "component count changes from " + std::to_string(d.components.size()) + " to " +
                 std::to_string(d.doubled_count) + " under doubling";
    }
  }
  return d;
}

EjectionCertificate ejection_certificate(const ChartedMap& f, const MarkovPartition& mp, const std::string& point,
                                         const std::vector<Curve2>& curves, double epsilon, int resolution) {
  if (curves.empty() || curves.size() > 2) throw Error(ErrorKind::invalid_curve, "expected one or two curves");
  if (epsilon < 0) throw Error(ErrorKind::invalid_parameters, "epsilon must be >= 0");
  EjectionCertificate c;
  c.delta = delta_d_components(f, mp, point, resolution);
  c.epsilon = epsilon;
  c.resolution = resolution;
  c.inconclusive = c.delta.inconclusive;
  const DiscRaster& r = c.delta.raster;
  Marked mk = periodic_marker(f, point);

  // (a) dense samples along the curves: annulus membership and clearance in cells
  const int window = 4;
  c.min_clearance_cells = window;
  for (const Curve2& curve : curves) {
    if (curve.size() < 2) throw Error(ErrorKind::invalid_curve, "a curve needs at least two points");
    for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
      Point2 a = curve[k], b = curve[k + 1];
      double len = std::hypot(b[0] - a[0], b[1] - a[1]);
      int steps = std::max(1, static_cast<int>(std::ceil(4 * len / r.h)));
      for (int s = 0; s <= steps; ++s) {
        double t = static_cast<double>(s) / steps;
        Point2 q{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
        auto lab = classify(f, mp, mk, r.axes, r.lift(q));
        if (lab == 0 || lab == 2)
          throw Error(ErrorKind::invalid_curve, "curve leaves the fundamental annulus");
        int ci = static_cast<int>(std::floor((q[0] - r.origin[0]) / r.h));
        int cj = static_cast<int>(std::floor((q[1] - r.origin[1]) / r.h));
        for (int i = ci - window; i <= ci + window; ++i)
          for (int j = cj - window; j <= cj + window; ++j) {
            if (i < 0 || j < 0 || i >= r.n || j >= r.n || r.at(i, j) != 3) continue;
            Point2 m = r.center(i, j);
            double dx = std::max(0.0, std::abs(q[0] - m[0]) - r.h / 2);
            double dy = std::max(0.0, std::abs(q[1] - m[1]) - r.h / 2);
            double dist = std::hypot(dx, dy) / r.h;
            if (dist < c.min_clearance_cells) {
              c.min_clearance_cells = dist;
              c.clearance_witness = q;
            }
          }
      }
    }
  }
  c.curves_clear = c.min_clearance_cells >= 2;

  // (b) the chain class of the orbit must stay within one cell of the orbit
  BoxGrid grid = make_grid(f.chart(), resolution);
  BoxGraph g = build_box_graph(f, full_set(grid), epsilon);
  MorseDecomposition md = morse_decomposition(g);
  BoxSet orbit{grid, {}};
  for (const Vec3& x : mk.orbit) {
    auto idx = grid.locate(x);
    if (!idx) throw Error(ErrorKind::invalid_marker, "orbit point outside the chart grid");
    for (int q : grid.neighbourhood(*idx, 1))
      if (grid.cell(q).contains(x, 1e-12)) orbit.boxes.push_back(q);
  }
  std::sort(orbit.boxes.begin(), orbit.boxes.end());
  orbit.boxes.erase(std::unique(orbit.boxes.begin(), orbit.boxes.end()), orbit.boxes.end());
  c.orbit_boxes = static_cast<int>(orbit.size());
  std::vector<int> classes;
  for (int b : orbit.boxes) {
    int k = md.class_of_node[g.node_of[b]];
    if (k >= 0) classes.push_back(k);
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  BoxSet near = dilate(orbit, 1);
  for (int k : classes)
    for (int b : md.classes[k]) {
      ++c.class_boxes;
      if (!near.contains(b)) ++c.far_boxes;
    }
  c.class_trivial = c.far_boxes == 0;
  c.certified = c.curves_clear && c.class_trivial && !c.inconclusive;
  return c;
}

nlohmann::json to_json(const DeltaD& d) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : d.components)
    comps.push_back({{"cells", c.cells},
                     {"area", c.area},
                     {"lo", c.lo},
                     {"hi", c.hi},
                     {"centroid", c.centroid}});
  nlohmann::json j{{"point", d.point},
                   {"period", d.period},
                   {"resolution", d.resolution},
                   {"plane_axes", d.raster.axes},
                   {"components", comps},
                   {"count", d.components.size()},
                   {"inconclusive", d.inconclusive}};
  if (d.doubled_count >= 0) j["doubled_count"] = d.doubled_count;
  if (d.inconclusive) j["reason"] = d.reason;
  return j;
}

nlohmann::json to_json(const EjectionCertificate& c) {
  return {{"delta", to_json(c.delta)},
          {"curves", {{"min_clearance_cells", c.min_clearance_cells},
                      {"witness", c.clearance_witness},
                      {"pass", c.curves_clear}}},
          {"chain_class", {{"epsilon", c.epsilon},
                           {"resolution", c.resolution},
                           {"orbit_boxes", c.orbit_boxes},
                           {"class_boxes", c.class_boxes},
                           {"far_boxes", c.far_boxes},
                           {"pass", c.class_trivial}}},
          {"inconclusive", c.inconclusive},
          {"certified", c.certified}};
}

}  // namespace phmp
