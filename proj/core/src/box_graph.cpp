#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "phmp/chain_recurrence.hpp"
#include "phmp/error.hpp"
#include "phmp/parallel.hpp"

namespace phmp {

Vec3 BoxGrid::cell_size() const {
  Vec3 e = box.extent();
  return {e.x / n[0], e.y / n[1], e.z / n[2]};
}

std::array<int, 3> BoxGrid::coords(int idx) const {
  int k = idx % n[2];
  int j = (idx / n[2]) % n[1];
  int i = idx / (n[1] * n[2]);
  return {i, j, k};
}

Box3 BoxGrid::cell(int idx) const {
  auto c = coords(idx);
  Vec3 h = cell_size();
  Box3 b;
  for (int a = 0; a < 3; ++a) {
    b.lo[a] = box.lo[a] + c[a] * h[a];
    b.hi[a] = c[a] + 1 == n[a] ? box.hi[a] : box.lo[a] + (c[a] + 1) * h[a];
  }
  return b;
}

std::optional<int> BoxGrid::locate(const Vec3& p) const {
  Vec3 h = cell_size();
  std::array<int, 3> c{};
  for (int a = 0; a < 3; ++a) {
    double t = (p[a] - box.lo[a]) / h[a];
    if (periodic[a]) {
      t = std::fmod(t, n[a]);
      if (t < 0) t += n[a];
    } else if (p[a] < box.lo[a] || p[a] > box.hi[a]) {
      return std::nullopt;
    }
    c[a] = std::clamp(static_cast<int>(std::floor(t)), 0, n[a] - 1);
  }
  return index(c[0], c[1], c[2]);
}

std::vector<int> BoxGrid::neighbourhood(int idx, int r) const {
  auto c = coords(idx);
  std::vector<int> out;
  for (int di = -r; di <= r; ++di)
    for (int dj = -r; dj <= r; ++dj)
      for (int dk = -r; dk <= r; ++dk) {
        std::array<int, 3> q{c[0] + di, c[1] + dj, c[2] + dk};
        bool ok = true;
        for (int a = 0; a < 3 && ok; ++a) {
          if (periodic[a])
            q[a] = ((q[a] % n[a]) + n[a]) % n[a];
          else if (q[a] < 0 || q[a] >= n[a])
            ok = false;
        }
        if (ok) out.push_back(index(q[0], q[1], q[2]));
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BoxGrid make_grid(const Chart& chart, int N) {
  if (N < 1) throw Error(ErrorKind::invalid_parameters, "grid resolution must be positive");
  return {chart.domain, {N, N, N}, chart.periodic};
}

BoxGrid make_grid(const Box3& box, int N) {
  if (N < 1) throw Error(ErrorKind::invalid_parameters, "grid resolution must be positive");
  return {box, {N, N, N}, {false, false, false}};
}

bool BoxSet::contains(int idx) const { return std::binary_search(boxes.begin(), boxes.end(), idx); }

BoxSet full_set(const BoxGrid& grid) {
  BoxSet s{grid, std::vector<int>(grid.size())};
  for (int i = 0; i < grid.size(); ++i) s.boxes[i] = i;
  return s;
}

BoxSet dilate(const BoxSet& s, int r) {
  std::vector<std::uint8_t> mark(s.grid.size(), 0);
  for (int b : s.boxes)
    for (int q : s.grid.neighbourhood(b, r)) mark[q] = 1;
  BoxSet out{s.grid, {}};
  for (int i = 0; i < s.grid.size(); ++i)
    if (mark[i]) out.boxes.push_back(i);
  return out;
}

BoxSet set_union(const BoxSet& a, const BoxSet& b) {
  BoxSet out{a.grid, {}};
  std::set_union(a.boxes.begin(), a.boxes.end(), b.boxes.begin(), b.boxes.end(), std::back_inserter(out.boxes));
  return out;
}

Box3 set_hull(const BoxSet& s) {
  Box3 h{{1e300, 1e300, 1e300}, {-1e300, -1e300, -1e300}};
  for (int b : s.boxes) {
    Box3 c = s.grid.cell(b);
    for (int a = 0; a < 3; ++a) {
      h.lo[a] = std::min(h.lo[a], c.lo[a]);
      h.hi[a] = std::max(h.hi[a], c.hi[a]);
    }
  }
  return h;
}

double set_diameter(const BoxSet& s) {
  if (s.empty()) return 0;
  return set_hull(s).diameter();
}

std::vector<std::pair<int, int>> run_length(const std::vector<int>& sorted) {
  std::vector<std::pair<int, int>> runs;
  for (int v : sorted) {
    if (!runs.empty() && runs.back().first + runs.back().second == v)
      ++runs.back().second;
    else
      runs.push_back({v, 1});
  }
  return runs;
}

std::size_t BoxGraph::edge_count() const {
  std::size_t e = targets.size();
  for (auto x : exits) e += x;
  return e;
}

bool BoxGraph::has_edge(int from, int to) const {
  auto [b, e] = out(from);
  return std::binary_search(b, e, to);
}

CellImage outer_image(const ChartedMap& f, const Box3& cell) {
  CellImage img;
  auto domains = f.branch_domains();
  bool single = domains.size() == 1;
  for (std::size_t k = 0; k < domains.size(); ++k) {
    Box3 sub = cell.intersect(domains[k]);
    if (sub.empty()) continue;
    auto eval = [&](const Vec3& p) {
      return single ? f.try_forward(p) : f.forward_branch(p, static_cast<int>(k));
    };
    Vec3 c = sub.center();
    auto fc = eval(c);
    if (!fc) {
      img.undefined = true;
      continue;
    }
    Vec3 half = 0.5 * sub.extent();
    Vec3 pad = f.lipschitz_matrix(sub) * half;
    Box3 b{*fc - pad, *fc + pad};
    auto add = [&](const Vec3& p) {
      auto q = eval(p);
      if (!q) {
        img.undefined = true;
        return;
      }
      // keep periodic coordinates next to the centre image
      Vec3 u = *fc + f.difference(*q, *fc);
      for (int a = 0; a < 3; ++a) {
        b.lo[a] = std::min(b.lo[a], u[a]);
        b.hi[a] = std::max(b.hi[a], u[a]);
      }
    };
    for (int m = 0; m < 8; ++m)
      add({m & 1 ? sub.hi.x : sub.lo.x, m & 2 ? sub.hi.y : sub.lo.y, m & 4 ? sub.hi.z : sub.lo.z});
    for (int a = 0; a < 3; ++a) {
      Vec3 p = c;
      p[a] = sub.lo[a];
      add(p);
      p[a] = sub.hi[a];
      add(p);
    }
    img.pieces.push_back(b);
  }
  return img;
}

namespace {

struct Targets {
  std::vector<int> cells;
  bool exits = false;
};

Targets cells_meeting(const BoxGrid& grid, const Box3& b, int self) {
  Targets t;
  Vec3 h = grid.cell_size();
  auto own = grid.coords(self);
  std::array<int, 3> lo{}, hi{};
  for (int a = 0; a < 3; ++a) {
    double tol = 1e-12 * (grid.box.hi[a] - grid.box.lo[a]);
    double l = b.lo[a], u = b.hi[a];
    if (!grid.periodic[a]) {
      if (l < grid.box.lo[a] - tol || u > grid.box.hi[a] + tol) t.exits = true;
      l = std::max(l, grid.box.lo[a]);
      u = std::min(u, grid.box.hi[a]);
      if (l > u) return t;
    }
    // closed boxes: a cell is met when it touches the image
    lo[a] = static_cast<int>(std::ceil((l - grid.box.lo[a] - tol) / h[a])) - 1;
    hi[a] = static_cast<int>(std::floor((u - grid.box.lo[a] + tol) / h[a]));
    if (grid.periodic[a]) {
      if (hi[a] - lo[a] + 1 >= grid.n[a]) {
        lo[a] = 0;
        hi[a] = grid.n[a] - 1;
      }
    } else {
      lo[a] = std::max(lo[a], 0);
      hi[a] = std::min(hi[a], grid.n[a] - 1);
    }
  }
  auto wrap = [&](int v, int a) { return grid.periodic[a] ? ((v % grid.n[a]) + grid.n[a]) % grid.n[a] : v; };
  for (int i = lo[0]; i <= hi[0]; ++i)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int k = lo[2]; k <= hi[2]; ++k) {
        std::array<int, 3> q{wrap(i, 0), wrap(j, 1), wrap(k, 2)};
        int idx = grid.index(q[0], q[1], q[2]);
        // along an axis where the target shares the source index, face contact is not
        // enough: the image has to overlap the open interval (otherwise cells next to a
        // grid-aligned fixed point pick up spurious cycles)
        bool keep = true;
        for (int a = 0; a < 3 && keep; ++a) {
          if (q[a] != own[a]) continue;
          double c_lo = grid.box.lo[a] + q[a] * h[a], c_hi = c_lo + h[a];
          double tol = 1e-9 * h[a];
          if (grid.periodic[a] && b.hi[a] - b.lo[a] >= grid.box.hi[a] - grid.box.lo[a]) continue;
          double lo_a = b.lo[a], hi_a = b.hi[a];
          if (grid.periodic[a]) {
            // bring the image interval next to the cell
            double len = grid.box.hi[a] - grid.box.lo[a];
            double shift = std::round(((c_lo + c_hi) / 2 - (lo_a + hi_a) / 2) / len) * len;
            lo_a += shift;
            hi_a += shift;
          }
          keep = hi_a > c_lo + tol && lo_a < c_hi - tol;
        }
        if (!keep) continue;
        t.cells.push_back(idx);
      }
  return t;
}

}  // namespace

BoxGraph build_box_graph(const ChartedMap& f, const BoxSet& region, double epsilon) {
  if (epsilon < 0) throw Error(ErrorKind::invalid_parameters, "epsilon must be >= 0");
  BoxGraph g;
  g.grid = region.grid;
  g.epsilon = epsilon;
  g.nodes = region.boxes;
  g.node_of.assign(g.grid.size(), -1);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) g.node_of[g.nodes[i]] = static_cast<int>(i);

  std::vector<std::vector<int>> adj(g.nodes.size());
  g.exits.assign(g.nodes.size(), 0);
  parallel_for(g.nodes.size(), [&](std::size_t n) {
    int idx = g.nodes[n];
    CellImage img = outer_image(f, g.grid.cell(idx));
    bool exits = img.undefined;
    std::vector<int> out;
    for (const Box3& piece : img.pieces) {
      Targets t = cells_meeting(g.grid, piece.grown(epsilon), idx);
      exits = exits || t.exits;
      for (int c : t.cells) {
        int m = g.node_of[c];
        if (m < 0)
          exits = true;
        else
          out.push_back(m);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    adj[n] = std::move(out);
    g.exits[n] = exits;
  });
  g.offsets.assign(g.nodes.size() + 1, 0);
  for (std::size_t n = 0; n < adj.size(); ++n) g.offsets[n + 1] = g.offsets[n] + adj[n].size();
  g.targets.reserve(g.offsets.back());
  for (auto& a : adj) g.targets.insert(g.targets.end(), a.begin(), a.end());
  return g;
}

nlohmann::json to_json(const BoxSet& s) {
  nlohmann::json runs = nlohmann::json::array();
  for (auto [a, l] : run_length(s.boxes)) runs.push_back({a, l});
  return {{"grid", {s.grid.n[0], s.grid.n[1], s.grid.n[2]}},
          {"count", s.boxes.size()},
          {"runs", runs}};
}

}  // namespace phmp
