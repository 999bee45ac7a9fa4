#include "phmp/markov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "phmp/chain_recurrence.hpp"
#include "phmp/error.hpp"
#include "phmp/parallel.hpp"

namespace phmp {

std::string to_string(PartitionType t) { return t == PartitionType::saddle ? "saddle" : "attracting"; }

std::string to_string(ComponentKind k) {
  switch (k) {
    case ComponentKind::vertical: return "vertical";
    case ComponentKind::lid_collapsed: return "lid-collapsed";
    case ComponentKind::violation: return "violation";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::array<int, 2> fiber_axes(int v) { return v == 0 ? std::array{1, 2} : (v == 1 ? std::array{0, 2} : std::array{0, 1}); }

// periodic coordinates of p moved next to `centre`
Vec3 near_to(const ChartedMap& f, const Vec3& p, const Vec3& centre) {
  const Chart& c = f.chart();
  Vec3 q = p;
  for (int a = 0; a < 3; ++a) {
    if (!c.periodic[a]) continue;
    double len = c.domain.hi[a] - c.domain.lo[a];
    q[a] += std::round((centre[a] - q[a]) / len) * len;
  }
  return q;
}

bool in_cross_section(const Box3& box, int v, const std::optional<double>& radius, const Vec3& q, double slack) {
  for (int a = 0; a < 3; ++a)
    if (q[a] < box.lo[a] - slack || q[a] > box.hi[a] + slack) return false;
  if (radius) {
    auto [a, b] = fiber_axes(v);
    Vec3 c = box.center();
    if (std::hypot(q[a] - c[a], q[b] - c[b]) > *radius + slack) return false;
  }
  return true;
}

}  // namespace

bool in_rectangle(const ChartedMap& f, const Rectangle& r, const Vec3& p, double slack) {
  Vec3 q = near_to(f, p, r.box.center());
  return in_cross_section(r.box, r.vertical_axis, r.fiber_radius, q, slack);
}

bool member(const ChartedMap& f, const MarkovPartition& mp, int i, const Vec3& p) {
  const Rectangle& r = mp.rectangles.at(i);
  if (!in_rectangle(f, r, p)) return false;
  if (r.itinerary.empty()) return true;
  if (!mp.parent) throw Error(ErrorKind::invalid_spec, "refined rectangle without parent partition");
  for (std::size_t k = 0; k < r.itinerary.size(); ++k) {
    int step = r.itinerary_start + static_cast<int>(k);
    std::optional<Vec3> y = p;
    for (int s = 0; s < std::abs(step) && y; ++s) y = step > 0 ? f.try_inverse(*y) : f.try_forward(*y);
    if (!y || !member(f, *mp.parent, r.itinerary[k], f.wrap(*y))) return false;
  }
  return true;
}

bool in_family(const ChartedMap& f, const MarkovPartition& mp, const Vec3& p) {
  for (std::size_t i = 0; i < mp.size(); ++i)
    if (member(f, mp, static_cast<int>(i), p)) return true;
  return false;
}

double region_clearance(const ChartedMap& f, const Region& r, const Vec3& p) {
  Vec3 q = near_to(f, p, r.box.center());
  double d = kInf;
  const int v = r.vertical_axis;
  if (r.side_boundary) {
    auto [a, b] = fiber_axes(v);
    if (r.fiber_radius) {
      Vec3 c = r.box.center();
      d = std::min(d, *r.fiber_radius - std::hypot(q[a] - c[a], q[b] - c[b]));
    } else {
      for (int ax : {a, b}) d = std::min({d, q[ax] - r.box.lo[ax], r.box.hi[ax] - q[ax]});
    }
  }
  if (r.lid_boundary) d = std::min({d, q[v] - r.box.lo[v], r.box.hi[v] - q[v]});
  return d;
}

void validate(const MarkovPartition& mp) {
  if (mp.rectangles.empty()) throw Error(ErrorKind::invalid_spec, "partition has no rectangles");
  for (const auto& r : mp.rectangles) {
    if (r.vertical_axis < 0 || r.vertical_axis > 2)
      throw Error(ErrorKind::invalid_spec, "rectangle " + r.label + ": vertical axis must be 0, 1 or 2");
    for (int a = 0; a < 3; ++a)
      if (!(r.box.hi[a] > r.box.lo[a]))
        throw Error(ErrorKind::invalid_spec, "rectangle " + r.label + " has empty interior");
    if (r.fiber_radius) {
      auto [a, b] = fiber_axes(r.vertical_axis);
      double half = 0.5 * std::min(r.box.hi[a] - r.box.lo[a], r.box.hi[b] - r.box.lo[b]);
      if (!(*r.fiber_radius > 0) || *r.fiber_radius > half * (1 + 1e-12))
        throw Error(ErrorKind::invalid_spec, "rectangle " + r.label + ": fiber radius must fit the box");
    }
    if (!r.itinerary.empty() && !mp.parent)
      throw Error(ErrorKind::invalid_spec, "rectangle " + r.label + " has an itinerary but no parent");
  }
  for (auto [a, b] : mp.adjacency)
    if (a < 0 || b < 0 || a >= static_cast<int>(mp.size()) || b >= static_cast<int>(mp.size()) || a == b)
      throw Error(ErrorKind::invalid_spec, "adjacency refers to unknown rectangles");
}

namespace {

// ---------- rasters

struct Raster {
  BoxGrid grid;
  std::vector<std::uint8_t> inside;  // cell centre is a member
  std::vector<int> side_dist;        // in-layer Chebyshev distance to a non-member cell
  int v = 2;
  double fiber_cell = 0;
};

Raster make_raster(const ChartedMap& f, const MarkovPartition& mp, int i, int N) {
  const Rectangle& r = mp.rectangles[i];
  Raster ra;
  ra.grid = make_grid(r.box, N);
  ra.v = r.vertical_axis;
  auto [fa, fb] = fiber_axes(ra.v);
  Vec3 h = ra.grid.cell_size();
  ra.fiber_cell = std::min(h[fa], h[fb]);
  const int n = ra.grid.size();
  ra.inside.assign(n, 0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t c) {
    ra.inside[c] = member(f, mp, i, ra.grid.cell(static_cast<int>(c)).center());
  });

  // two-pass chessboard distance per layer; outside the raster counts as non-member
  ra.side_dist.assign(n, 0);
  const int big = 1 << 20;
  for (int layer = 0; layer < N; ++layer) {
    auto at = [&](int p, int q) -> int {
      std::array<int, 3> c{};
      c[ra.v] = layer;
      c[fa] = p;
      c[fb] = q;
      return ra.grid.index(c[0], c[1], c[2]);
    };
    auto get = [&](int p, int q) { return (p < 0 || q < 0 || p >= N || q >= N) ? 0 : ra.side_dist[at(p, q)]; };
    for (int p = 0; p < N; ++p)
      for (int q = 0; q < N; ++q) {
        int idx = at(p, q);
        if (!ra.inside[idx]) continue;
        int d = big;
        d = std::min({d, get(p - 1, q) + 1, get(p, q - 1) + 1, get(p - 1, q - 1) + 1, get(p - 1, q + 1) + 1});
        ra.side_dist[idx] = d;
      }
    for (int p = N - 1; p >= 0; --p)
      for (int q = N - 1; q >= 0; --q) {
        int idx = at(p, q);
        if (!ra.inside[idx]) continue;
        int d = ra.side_dist[idx];
        d = std::min({d, get(p + 1, q) + 1, get(p, q + 1) + 1, get(p + 1, q + 1) + 1, get(p + 1, q - 1) + 1});
        ra.side_dist[idx] = d;
      }
  }
  return ra;
}

// marks of f(R_j) over every target raster; outer approximation with Lipschitz padding
std::vector<std::vector<std::uint8_t>> mark_image(const ChartedMap& f, const MarkovPartition& mp, int j,
                                                  const std::vector<Raster>& rasters) {
  const Rectangle& src = mp.rectangles[j];
  std::vector<std::vector<std::uint8_t>> marks(rasters.size());
  for (std::size_t i = 0; i < rasters.size(); ++i) marks[i].assign(rasters[i].grid.size(), 0);

  Vec3 cell_min{kInf, kInf, kInf};
  for (const auto& ra : rasters) {
    Vec3 h = ra.grid.cell_size();
    for (int a = 0; a < 3; ++a) cell_min[a] = std::min(cell_min[a], h[a]);
  }
  const int N = rasters.front().grid.n[0];
  const bool refined = !src.itinerary.empty();
  auto domains = f.branch_domains();
  const bool single = domains.size() == 1;

  for (std::size_t k = 0; k < domains.size(); ++k) {
    Box3 sub = src.box.intersect(domains[k]);
    if (sub.empty()) continue;
    Mat3 L = f.lipschitz_matrix(sub);
    // sample spacing so that each padding component stays below one target cell
    Vec3 s;
    std::array<int, 3> cnt{};
    for (int l = 0; l < 3; ++l) {
      double ext = sub.hi[l] - sub.lo[l];
      double sl = (src.box.hi[l] - src.box.lo[l]) / N;
      for (int a = 0; a < 3; ++a)
        if (L(a, l) > 0) sl = std::min(sl, 2 * cell_min[a] / (3 * L(a, l)));
      cnt[l] = std::max(1, static_cast<int>(std::ceil(ext / sl - 1e-9)));
      s[l] = ext / cnt[l];
    }
    Vec3 pad = L * (0.5 * s);
    double slack = 0.5 * norm(s);
    const std::size_t total = static_cast<std::size_t>(cnt[0]) * cnt[1] * cnt[2];
    // marks are idempotent byte writes; a sequential loop keeps this simple and deterministic
    for (std::size_t t = 0; t < total; ++t) {
      int a0 = static_cast<int>(t / (static_cast<std::size_t>(cnt[1]) * cnt[2]));
      int a1 = static_cast<int>((t / cnt[2]) % cnt[1]);
      int a2 = static_cast<int>(t % cnt[2]);
      Vec3 x{sub.lo.x + (a0 + 0.5) * s.x, sub.lo.y + (a1 + 0.5) * s.y, sub.lo.z + (a2 + 0.5) * s.z};
      bool ok = refined ? member(f, mp, j, x) : in_rectangle(f, src, x, slack);
      if (!ok) continue;
      auto y = single ? f.try_forward(x) : f.forward_branch(x, static_cast<int>(k));
      if (!y) continue;
      for (std::size_t i = 0; i < rasters.size(); ++i) {
        const BoxGrid& g = rasters[i].grid;
        Vec3 yc = near_to(f, *y, g.box.center());
        Box3 img{yc - pad, yc + pad};
        if (!img.intersects(g.box)) continue;
        Vec3 h = g.cell_size();
        std::array<int, 3> lo{}, hi{};
        for (int a = 0; a < 3; ++a) {
          lo[a] = std::max(0, static_cast<int>(std::ceil((img.lo[a] - g.box.lo[a]) / h[a])) - 1);
          hi[a] = std::min(g.n[a] - 1, static_cast<int>(std::floor((img.hi[a] - g.box.lo[a]) / h[a])));
        }
        for (int p = lo[0]; p <= hi[0]; ++p)
          for (int q = lo[1]; q <= hi[1]; ++q)
            for (int r = lo[2]; r <= hi[2]; ++r) marks[i][g.index(p, q, r)] = 1;
      }
    }
  }
  return marks;
}

int count_layer_pieces(const Raster& ra, const std::vector<int>& cells, int layer) {
  auto [fa, fb] = fiber_axes(ra.v);
  const int N = ra.grid.n[0];
  std::vector<std::uint8_t> on(static_cast<std::size_t>(N) * N, 0);
  for (int c : cells) {
    auto q = ra.grid.coords(c);
    if (q[ra.v] == layer) on[static_cast<std::size_t>(q[fa]) * N + q[fb]] = 1;
  }
  int pieces = 0;
  std::vector<int> stack;
  for (int s = 0; s < N * N; ++s) {
    if (!on[s]) continue;
    ++pieces;
    on[s] = 0;
    stack.push_back(s);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      int p = u / N, q = u % N;
      const int dp[4] = {1, -1, 0, 0}, dq[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        int pp = p + dp[d], qq = q + dq[d];
        if (pp < 0 || qq < 0 || pp >= N || qq >= N) continue;
        int w = pp * N + qq;
        if (on[w]) {
          on[w] = 0;
          stack.push_back(w);
        }
      }
    }
  }
  return pieces;
}

std::vector<Component> components_of(const Raster& ra, const std::vector<std::uint8_t>& mark, int j, int i,
                                     PartitionType type, double margin) {
  std::vector<Component> out;
  const int n = ra.grid.size();
  const int N = ra.grid.n[0];
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<int> stack, cells;
  for (int s = 0; s < n; ++s) {
    if (seen[s] || !mark[s] || !ra.inside[s]) continue;
    cells.clear();
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      cells.push_back(u);
      auto c = ra.grid.coords(u);
      for (int a = 0; a < 3; ++a)
        for (int d : {-1, 1}) {
          auto q = c;
          q[a] += d;
          if (q[a] < 0 || q[a] >= N) continue;
          int w = ra.grid.index(q[0], q[1], q[2]);
          if (!seen[w] && mark[w] && ra.inside[w]) {
            seen[w] = 1;
            stack.push_back(w);
          }
        }
    }
    Component comp;
    comp.source = j;
    comp.target = i;
    comp.cells = static_cast<int>(cells.size());
    int lmin = N, lmax = -1, dmin = 1 << 20;
    Box3 hull{{kInf, kInf, kInf}, {-kInf, -kInf, -kInf}};
    for (int u : cells) {
      auto c = ra.grid.coords(u);
      lmin = std::min(lmin, c[ra.v]);
      lmax = std::max(lmax, c[ra.v]);
      dmin = std::min(dmin, ra.side_dist[u]);
      Box3 b = ra.grid.cell(u);
      for (int a = 0; a < 3; ++a) {
        hull.lo[a] = std::min(hull.lo[a], b.lo[a]);
        hull.hi[a] = std::max(hull.hi[a], b.hi[a]);
      }
    }
    comp.hull = hull;
    comp.layers = lmax - lmin + 1;
    comp.bottom = lmin == 0;
    comp.top = lmax == N - 1;
    comp.side_clearance = (dmin - 1) * ra.fiber_cell;
    if (comp.bottom) comp.bottom_pieces = count_layer_pieces(ra, cells, 0);
    if (comp.top) comp.top_pieces = count_layer_pieces(ra, cells, N - 1);
    bool clear = comp.side_clearance >= margin * (1 - 1e-9);
    if (comp.bottom && comp.top) {
      if (!clear) {
        comp.reason = "side clearance below margin";
      } else if (type == PartitionType::saddle && (comp.bottom_pieces != 1 || comp.top_pieces != 1)) {
        comp.reason = "lid trace is not a single piece";
      } else {
        comp.kind = ComponentKind::vertical;
      }
    } else if ((comp.bottom || comp.top) && comp.layers <= 3) {
      if (clear)
        comp.kind = ComponentKind::lid_collapsed;
      else
        comp.reason = "lid image touches the side boundary";
    } else {
      comp.reason = comp.bottom || comp.top ? "reaches only one lid" : "touches no lid";
    }
    out.push_back(comp);
  }
  return out;
}

struct RasterPass {
  std::vector<Component> components;
  std::vector<std::vector<int>> incidence;  // [j][i]
};

RasterPass raster_pass(const ChartedMap& f, const MarkovPartition& mp, int N, double margin) {
  const int k = static_cast<int>(mp.size());
  std::vector<Raster> rasters(k);
  for (int i = 0; i < k; ++i) rasters[i] = make_raster(f, mp, i, N);
  RasterPass rp;
  rp.incidence.assign(k, std::vector<int>(k, 0));
  std::vector<std::vector<Component>> per_source(k);
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t j) {
    auto marks = mark_image(f, mp, static_cast<int>(j), rasters);
    for (int i = 0; i < k; ++i) {
      auto comps = components_of(rasters[i], marks[i], static_cast<int>(j), i, mp.type, margin);
      per_source[j].insert(per_source[j].end(), comps.begin(), comps.end());
    }
  });
  for (int j = 0; j < k; ++j)
    for (const auto& c : per_source[j]) {
      if (c.kind != ComponentKind::lid_collapsed) ++rp.incidence[j][c.target];
      rp.components.push_back(c);
    }
  return rp;
}

double default_margin(const MarkovPartition& mp, int N) {
  double m = kInf;
  for (const auto& r : mp.rectangles) {
    auto [a, b] = fiber_axes(r.vertical_axis);
    m = std::min({m, (r.box.hi[a] - r.box.lo[a]) / N, (r.box.hi[b] - r.box.lo[b]) / N});
  }
  return 2 * m;
}

// structural checks: disjointness (saddle) or lid adjacency (attracting)
void check_layout(const ChartedMap& f, const MarkovPartition& mp, std::vector<std::string>& violations) {
  const int k = static_cast<int>(mp.size());
  auto declared = [&](int a, int b) {
    for (auto [p, q] : mp.adjacency)
      if ((p == a && q == b) || (p == b && q == a)) return true;
    return false;
  };
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      const Rectangle& ra = mp.rectangles[a];
      const Rectangle& rb = mp.rectangles[b];
      Vec3 shift = near_to(f, rb.box.center(), ra.box.center()) - rb.box.center();
      Box3 bb{rb.box.lo + shift, rb.box.hi + shift};
      Box3 in = ra.box.intersect(bb);
      bool empty = false;
      int thin_axis = -1;
      for (int ax = 0; ax < 3; ++ax) {
        double t = in.hi[ax] - in.lo[ax];
        double tol = 1e-12 * std::max(1.0, std::abs(ra.box.hi[ax] - ra.box.lo[ax]));
        if (t < -tol) empty = true;
        else if (t <= tol) thin_axis = ax;
      }
      if (empty) continue;
      const std::string pair = mp.rectangles[a].label + " / " + mp.rectangles[b].label;
      const int m = 7;
      int common = 0;
      for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q)
          for (int r = 0; r < m; ++r) {
            Vec3 t{(p + 0.5) / m, (q + 0.5) / m, (r + 0.5) / m};
            Vec3 x;
            for (int ax = 0; ax < 3; ++ax) x[ax] = in.lo[ax] + t[ax] * (in.hi[ax] - in.lo[ax]);
            if (member(f, mp, a, x) && member(f, mp, b, x - shift)) ++common;
          }
      if (common == 0) continue;
      if (thin_axis < 0) {
        violations.push_back("rectangles overlap: " + pair);
      } else if (mp.type == PartitionType::saddle) {
        violations.push_back("rectangles touch: " + pair);
      } else if (thin_axis != ra.vertical_axis || thin_axis != rb.vertical_axis) {
        violations.push_back("rectangles meet along a side: " + pair);
      } else if (mp.strict_lids && !declared(a, b)) {
        violations.push_back("undeclared lid contact: " + pair);
      }
    }
  for (auto [a, b] : mp.adjacency) {
    const Rectangle& ra = mp.rectangles[a];
    const Rectangle& rb = mp.rectangles[b];
    Vec3 shift = near_to(f, rb.box.center(), ra.box.center()) - rb.box.center();
    Box3 in = ra.box.intersect({rb.box.lo + shift, rb.box.hi + shift});
    bool apart = false;
    for (int ax = 0; ax < 3; ++ax) apart = apart || in.hi[ax] < in.lo[ax] - 1e-12;
    if (apart)
      violations.push_back("declared adjacency without contact: " + ra.label + " / " + rb.label);
  }
}

std::vector<Vec3> boundary_samples(const ChartedMap& f, const Region& r, int N) {
  std::vector<Vec3> pts;
  const int v = r.vertical_axis;
  auto [a, b] = fiber_axes(v);
  Vec3 c = r.box.center();
  if (r.side_boundary) {
    for (int l = 0; l <= N; ++l) {
      double tv = r.box.lo[v] + (r.box.hi[v] - r.box.lo[v]) * l / N;
      if (r.fiber_radius) {
        for (int s = 0; s < 4 * N; ++s) {
          double ang = 2 * kPi * s / (4 * N);
          Vec3 p = c;
          p[v] = tv;
          p[a] = c[a] + *r.fiber_radius * std::cos(ang);
          p[b] = c[b] + *r.fiber_radius * std::sin(ang);
          pts.push_back(p);
        }
      } else {
        for (int ax : {a, b})
          for (double side : {r.box.lo[ax], r.box.hi[ax]}) {
            int other = ax == a ? b : a;
            for (int s = 0; s <= N; ++s) {
              Vec3 p = c;
              p[v] = tv;
              p[ax] = side;
              p[other] = r.box.lo[other] + (r.box.hi[other] - r.box.lo[other]) * s / N;
              pts.push_back(p);
            }
          }
      }
    }
  }
  if (r.lid_boundary) {
    for (double lid : {r.box.lo[v], r.box.hi[v]})
      for (int p = 0; p <= N; ++p)
        for (int q = 0; q <= N; ++q) {
          Vec3 x = c;
          x[v] = lid;
          x[a] = r.box.lo[a] + (r.box.hi[a] - r.box.lo[a]) * p / N;
          x[b] = r.box.lo[b] + (r.box.hi[b] - r.box.lo[b]) * q / N;
          if (r.fiber_radius && std::hypot(x[a] - c[a], x[b] - c[b]) > *r.fiber_radius) continue;
          pts.push_back(x);
        }
  }
  std::vector<Vec3> kept;
  for (const auto& p : pts) {
    Vec3 w = f.wrap(p);
    if (f.in_domain(w)) kept.push_back(w);
  }
  return kept;
}

FiltrationCheck check_region(const ChartedMap& f, const Region& r, bool forward, int N, double margin) {
  FiltrationCheck fc;
  fc.what = forward ? "f(A) in int(A)" : "f^-1(R) in int(R)";
  fc.min_clearance = kInf;
  for (const Vec3& p : boundary_samples(f, r, N)) {
    auto y = forward ? f.try_forward(p) : f.try_inverse(p);
    if (!y) continue;
    ++fc.samples;
    double d = region_clearance(f, r, *y);
    if (d < fc.min_clearance) {
      fc.min_clearance = d;
      fc.worst = p;
    }
  }
  fc.pass = fc.samples > 0 && fc.min_clearance >= margin;
  return fc;
}

}  // namespace

PartitionReport verify_partition(const ChartedMap& f, const MarkovPartition& mp, const RasterOptions& opt) {
  validate(mp);
  if (opt.resolution < 32) throw Error(ErrorKind::invalid_parameters, "partition resolution must be >= 32");
  PartitionReport rep;
  rep.resolution = opt.resolution;
  rep.margin = opt.margin ? *opt.margin : default_margin(mp, opt.resolution);
  check_layout(f, mp, rep.violations);

  RasterPass rp = raster_pass(f, mp, opt.resolution, rep.margin);
  rep.components = rp.components;
  rep.incidence = rp.incidence;
  for (const auto& c : rep.components)
    if (c.kind == ComponentKind::violation)
      rep.violations.push_back("component of f(" + mp.rectangles[c.source].label + ") in " +
                               mp.rectangles[c.target].label + ": " + c.reason);

  if (opt.check_doubling) {
    RasterPass fine = raster_pass(f, mp, 2 * opt.resolution, rep.margin);
    auto kinds = [](const std::vector<Component>& cs) {
      std::array<int, 3> k{};
      for (const auto& c : cs) ++k[static_cast<int>(c.kind)];
      return k;
    };
    auto kc = kinds(rp.components), kf = kinds(fine.components);
    if (fine.incidence != rp.incidence || kc[0] != kf[0] || kc[2] != kf[2]) {
      rep.inconclusive = true;
      rep.inconclusive_reason = "component counts change between N = " + std::to_string(opt.resolution) +
                                " and N = " + std::to_string(2 * opt.resolution);
    }
  }

  if (mp.attracting_region) rep.filtration.push_back(check_region(f, *mp.attracting_region, true, opt.resolution, rep.margin));
  if (mp.repelling_region) rep.filtration.push_back(check_region(f, *mp.repelling_region, false, opt.resolution, rep.margin));
  for (const auto& fc : rep.filtration)
    if (!fc.pass) rep.violations.push_back(fc.what + " fails (clearance " + std::to_string(fc.min_clearance) + ")");

  rep.pass = rep.violations.empty() && !rep.inconclusive;
  return rep;
}

IncidenceMatrix incidence_matrix(const ChartedMap& f, const MarkovPartition& mp, int resolution, bool check_doubling) {
  validate(mp);
  if (resolution < 2) throw Error(ErrorKind::invalid_parameters, "resolution must be >= 2");
  double margin = default_margin(mp, resolution);
  IncidenceMatrix m;
  for (const auto& r : mp.rectangles) m.labels.push_back(r.label);
  m.a = raster_pass(f, mp, resolution, margin).incidence;
  if (check_doubling) m.inconclusive = raster_pass(f, mp, 2 * resolution, margin).incidence != m.a;
  return m;
}

namespace {

using Bool = std::vector<std::vector<std::uint8_t>>;

Bool positive(const std::vector<std::vector<int>>& a) {
  Bool p(a.size(), std::vector<std::uint8_t>(a.size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != a.size()) throw Error(ErrorKind::invalid_parameters, "incidence matrix must be square");
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (a[i][j] < 0) throw Error(ErrorKind::invalid_parameters, "incidence entries must be nonnegative");
      p[i][j] = a[i][j] > 0;
    }
  }
  return p;
}

// boolean product: only positivity matters, so counts never overflow
Bool bool_mul(const Bool& x, const Bool& y) {
  const std::size_t n = x.size();
  Bool z(n, std::vector<std::uint8_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      if (x[i][k])
        for (std::size_t j = 0; j < n; ++j) z[i][j] |= y[k][j];
  return z;
}

}  // namespace

PowerVerdict is_mixing(const std::vector<std::vector<int>>& a, int n_max) {
  if (n_max < 1) throw Error(ErrorKind::invalid_parameters, "n_max must be >= 1");
  Bool base = positive(a), pw = base;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) pw = bool_mul(pw, base);
    bool all = !pw.empty();
    for (const auto& row : pw)
      for (auto x : row) all = all && x;
    if (all) return {true, n};
  }
  return {false, 0};
}

PowerVerdict is_transitive(const std::vector<std::vector<int>>& a, int n_max) {
  if (n_max < 1) throw Error(ErrorKind::invalid_parameters, "n_max must be >= 1");
  Bool base = positive(a), pw = base;
  const std::size_t k = base.size();
  Bool seen(k, std::vector<std::uint8_t>(k, 0));
  int worst = 0;
  std::size_t missing = k * k;
  for (int n = 1; n <= n_max && missing > 0; ++n) {
    if (n > 1) pw = bool_mul(pw, base);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (pw[i][j] && !seen[i][j]) {
          seen[i][j] = 1;
          --missing;
          worst = n;
        }
  }
  if (missing > 0 || k == 0) return {false, 0};
  return {true, worst};
}

MarkovPartition solenoid_partition(double shrink) {
  MarkovPartition mp;
  mp.type = PartitionType::attracting;
  for (int i = 0; i < 4; ++i) {
    double r = i % 2 ? shrink : 1.0;
    Rectangle R;
    R.chart = "solid-torus";
    R.box = {{i / 4.0, -r, -r}, {(i + 1) / 4.0, r, r}};
    R.vertical_axis = 0;
    R.fiber_radius = r;
    R.label = "P" + std::to_string(i);
    mp.rectangles.push_back(R);
  }
  mp.adjacency = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  mp.attracting_region = Region{{{0, -1, -1}, {1, 1, 1}}, 0, 1.0, true, false};
  return mp;
}

MarkovPartition horseshoe_partition() {
  MarkovPartition mp;
  mp.type = PartitionType::saddle;
  Rectangle R;
  R.chart = "cylinder-box";
  R.box = {{-1, -1, 0}, {1, 1, 1}};
  R.vertical_axis = 2;
  R.fiber_radius = 1.0;
  R.label = "R";
  mp.rectangles.push_back(R);
  // the chart cylinder (no lids) and a slab slightly thicker than the rectangle
  mp.attracting_region = Region{{{-1, -1, -0.25}, {1, 1, 1.25}}, 2, 1.0, true, false};
  mp.repelling_region = Region{{{-1, -1, -0.2}, {1, 1, 1.2}}, 2, std::nullopt, false, true};
  return mp;
}

MarkovPartition identity_partition() {
  MarkovPartition mp;
  mp.type = PartitionType::saddle;
  Rectangle R;
  R.chart = "cube";
  R.box = {{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
  R.vertical_axis = 2;
  R.label = "C";
  mp.rectangles.push_back(R);
  return mp;
}

MarkovPartition builtin_partition(const std::string& model) {
  if (model == "solenoid") return solenoid_partition();
  if (model == "horseshoe3d" || model == "horseshoe") return horseshoe_partition();
  if (model == "identity") return identity_partition();
  throw Error(ErrorKind::usage, "no bundled partition for model '" + model + "'");
}

}  // namespace phmp
