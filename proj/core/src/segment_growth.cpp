#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "phmp/chain_recurrence.hpp"
#include "phmp/error.hpp"
#include "phmp/markov.hpp"
#include "phmp/parallel.hpp"

namespace phmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// p after `step` iterates of f^-1 (negative step: forward iterates); nullopt once it leaves the chart
std::optional<Vec3> pull(const ChartedMap& f, Vec3 p, int step) {
  for (int s = 0; s < std::abs(step); ++s) {
    auto y = step > 0 ? f.try_inverse(p) : f.try_forward(p);
    if (!y) return std::nullopt;
    p = f.wrap(*y);
    if (!f.in_domain(p)) return std::nullopt;
  }
  return p;
}

int parent_of(const ChartedMap& f, const MarkovPartition& mp, const Vec3& p) {
  for (std::size_t c = 0; c < mp.size(); ++c)
    if (member(f, mp, static_cast<int>(c), p)) return static_cast<int>(c);
  return -1;
}

}  // namespace

MarkovPartition refine(const ChartedMap& f, const MarkovPartition& mp, int m, int n, int resolution) {
  validate(mp);
  if (m > 0 || n < 0) throw Error(ErrorKind::invalid_parameters, "refinement range must satisfy m <= 0 <= n");
  if (n - m > 8) throw Error(ErrorKind::invalid_parameters, "refinement range longer than 8 iterates");
  if (resolution < 8) throw Error(ErrorKind::invalid_parameters, "refinement resolution must be >= 8");
  if (m == 0 && n == 0) return mp;

  auto parent = std::make_shared<const MarkovPartition>(mp);
  MarkovPartition out;
  out.type = mp.type;
  out.parent = parent;
  out.strict_lids = false;
  out.attracting_region = mp.attracting_region;
  out.repelling_region = mp.repelling_region;

  struct Piece {
    std::vector<int> itinerary;
    int first_cell;
    Rectangle rect;
  };
  std::vector<Piece> pieces;

  for (int s0 = 0; s0 < static_cast<int>(mp.size()); ++s0) {
    const Rectangle& base = mp.rectangles[s0];
    BoxGrid g = make_grid(base.box, resolution);
    const int cells = g.size();
    // itinerary code per cell, -1 when some iterate leaves the family
    std::vector<std::vector<int>> code(cells);
    parallel_for(static_cast<std::size_t>(cells), [&](std::size_t c) {
      Vec3 x = g.cell(static_cast<int>(c)).center();
      if (!member(f, mp, s0, x)) return;
      std::vector<int> it(n - m + 1);
      it[-m] = s0;
      // forward iterates for negative indices, backward for positive
      std::optional<Vec3> y = x;
      for (int i = -1; i >= m; --i) {
        y = pull(f, *y, -1);
        if (!y || (it[i - m] = parent_of(f, mp, *y)) < 0) return;
      }
      y = x;
      for (int i = 1; i <= n; ++i) {
        y = pull(f, *y, 1);
        if (!y || (it[i - m] = parent_of(f, mp, *y)) < 0) return;
      }
      code[c] = std::move(it);
    });

    std::vector<std::uint8_t> seen(cells, 0);
    std::vector<int> stack, comp;
    const int N = resolution;
    const int v = base.vertical_axis;
    for (int s = 0; s < cells; ++s) {
      if (seen[s] || code[s].empty()) continue;
      comp.clear();
      seen[s] = 1;
      stack.push_back(s);
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        comp.push_back(u);
        auto c = g.coords(u);
        for (int a = 0; a < 3; ++a)
          for (int d : {-1, 1}) {
            auto q = c;
            q[a] += d;
            if (q[a] < 0 || q[a] >= N) continue;
            int w = g.index(q[0], q[1], q[2]);
            if (!seen[w] && code[w] == code[s]) {
              seen[w] = 1;
              stack.push_back(w);
            }
          }
      }
      std::array<int, 3> lo{N, N, N}, hi{-1, -1, -1};
      for (int u : comp) {
        auto c = g.coords(u);
        for (int a = 0; a < 3; ++a) {
          lo[a] = std::min(lo[a], c[a]);
          hi[a] = std::max(hi[a], c[a]);
        }
      }
      // slivers pressed against a single lid are raster artefacts of the boundary
      bool bottom = lo[v] == 0, top = hi[v] == N - 1;
      if (bottom != top && hi[v] - lo[v] + 1 <= 2) continue;

      Vec3 h = g.cell_size();
      Rectangle r;
      r.chart = base.chart;
      r.vertical_axis = v;
      for (int a = 0; a < 3; ++a) {
        r.box.lo[a] = std::max(base.box.lo[a], g.box.lo[a] + (lo[a] - 1) * h[a]);
        r.box.hi[a] = std::min(base.box.hi[a], g.box.lo[a] + (hi[a] + 2) * h[a]);
      }
      r.itinerary = code[s];
      r.itinerary_start = m;
      pieces.push_back({code[s], s0 * cells + s, r});
    }
  }
  if (pieces.empty()) throw Error(ErrorKind::coverage, "refinement is empty");

  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    return a.itinerary != b.itinerary ? a.itinerary < b.itinerary : a.first_cell < b.first_cell;
  });
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    std::string label;
    for (std::size_t t = 0; t < pieces[k].itinerary.size(); ++t)
      label += (t ? "." : "") + mp.rectangles[pieces[k].itinerary[t]].label;
    int dup = 0, idx = 0;
    for (std::size_t o = 0; o < pieces.size(); ++o)
      if (pieces[o].itinerary == pieces[k].itinerary) {
        ++dup;
        if (o < k) ++idx;
      }
    if (dup > 1) label += "#" + std::to_string(idx);
    pieces[k].rect.label = label;
    out.rectangles.push_back(pieces[k].rect);
  }

  // lid contacts between pieces become declared adjacencies
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = a + 1; b < out.size(); ++b) {
      const Rectangle& ra = out.rectangles[a];
      const Rectangle& rb = out.rectangles[b];
      if (ra.vertical_axis != rb.vertical_axis) continue;
      Vec3 cb = rb.box.center();
      Vec3 shift = f.difference(cb, ra.box.center()) + ra.box.center() - cb;
      Box3 in = ra.box.intersect({rb.box.lo + shift, rb.box.hi + shift});
      const int v = ra.vertical_axis;
      bool touch = true;
      for (int ax = 0; ax < 3; ++ax) {
        double t = in.hi[ax] - in.lo[ax];
        double tol = 1e-12 * std::max(1.0, ra.box.hi[ax] - ra.box.lo[ax]);
        if (ax == v ? std::abs(t) > tol : t <= tol) touch = false;
      }
      if (touch) out.adjacency.push_back({static_cast<int>(a), static_cast<int>(b)});
    }
  validate(out);
  return out;
}

// ---------- crossings

int count_crossings(const ChartedMap& f, const MarkovPartition& mp, int i, const std::vector<Polyline>& curves) {
  const Rectangle& r = mp.rectangles.at(i);
  const int v = r.vertical_axis;
  const Vec3 centre = r.box.center();
  const double tol = 1e-7 * (r.box.hi[v] - r.box.lo[v]);
  // -1 bottom, +1 top, 0 elsewhere (side or not on a lid)
  auto side_of = [&](const Vec3& p) {
    Vec3 q = f.difference(p, centre) + centre;
    if (q[v] <= r.box.lo[v] + tol) return -1;
    if (q[v] >= r.box.hi[v] - tol) return 1;
    return 0;
  };
  int count = 0;
  for (const Polyline& c : curves) {
    std::size_t k = 0;
    while (k < c.size()) {
      if (!member(f, mp, i, c[k])) {
        ++k;
        continue;
      }
      std::size_t start = k;
      while (k < c.size() && member(f, mp, i, c[k])) ++k;
      // entry / exit side from the neighbouring outside point, or the end point itself
      int in_side = start > 0 ? side_of(c[start - 1]) : side_of(c[start]);
      int out_side = k < c.size() ? side_of(c[k]) : side_of(c[k - 1]);
      if (in_side != 0 && out_side != 0 && in_side != out_side) ++count;
    }
  }
  return count;
}

namespace {

struct Sample {
  double t;  // parameter along the original polyline
  Vec3 y;    // f^n image, wrapped
};

class Tracker {
 public:
  Tracker(const ChartedMap& f, const Polyline& seg, double tol) : f_(f), seg_(seg), tol_(tol) {}

  Vec3 origin(double t) const {
    double last = static_cast<double>(seg_.size() - 1);
    t = std::clamp(t, 0.0, last);
    std::size_t k = std::min(static_cast<std::size_t>(t), seg_.size() - 2);
    double u = t - static_cast<double>(k);
    return seg_[k] + u * (seg_[k + 1] - seg_[k]);
  }

  std::optional<Vec3> eval(double t, int n) const {
    Vec3 p = f_.wrap(origin(t));
    if (!f_.in_domain(p)) return std::nullopt;
    return pull(f_, p, -n);
  }

  // image pieces of one parent piece under f^n, refined until chords are below tol
  void advance(const std::vector<Sample>& piece, int n, std::vector<std::vector<Sample>>& out) {
    std::vector<Sample> cur;
    auto flush = [&]() {
      if (cur.size() >= 2) out.push_back(cur);
      cur.clear();
    };
    std::optional<Vec3> prev;
    for (std::size_t k = 0; k < piece.size(); ++k) {
      auto y = eval(piece[k].t, n);
      if (k > 0) bridge(piece[k - 1].t, prev, piece[k].t, y, n, 0, cur, flush);
      if (y) {
        cur.push_back({piece[k].t, *y});
      } else {
        flush();
      }
      prev = y;
      if (total_ > kMaxPoints) throw Error(ErrorKind::unattainable_parameters, "segment growth needs too many points");
    }
    flush();
  }

  std::size_t total_ = 0;

 private:
  static constexpr std::size_t kMaxPoints = 4'000'000;
  static constexpr double kMinStep = 1e-13;

  // fills samples strictly between a and b
  void bridge(double a, const std::optional<Vec3>& ya, double b, const std::optional<Vec3>& yb, int n, int depth,
              std::vector<Sample>& cur, const std::function<void()>& flush) {
    if (!ya && !yb) return;
    if (ya && yb && norm(f_.difference(*yb, *ya)) <= tol_) return;
    double mid = 0.5 * (a + b);
    if (b - a < kMinStep || depth > 60) {
      // jump or edge of the domain: cut the curve here
      if (ya && yb) flush();
      return;
    }
    auto ym = eval(mid, n);
    bridge(a, ya, mid, ym, n, depth + 1, cur, flush);
    if (ym) {
      cur.push_back({mid, *ym});
      ++total_;
    } else {
      flush();
    }
    bridge(mid, ym, b, yb, n, depth + 1, cur, flush);
  }

  const ChartedMap& f_;
  const Polyline& seg_;
  double tol_;
};

}  // namespace

GrowthReport vertical_segment_growth(const ChartedMap& f, const MarkovPartition& mp, const Polyline& segment,
                                     int n_max, double aperture, double chord_tol) {
  validate(mp);
  if (segment.size() < 2) throw Error(ErrorKind::invalid_curve, "segment needs at least two points");
  if (n_max < 0 || n_max > 16) throw Error(ErrorKind::invalid_parameters, "iterate count must be in [0, 16]");
  if (!(aperture > 0 && aperture < kPi / 2)) throw Error(ErrorKind::invalid_parameters, "aperture must be in (0, 90) degrees");
  int home = parent_of(f, mp, f.wrap(segment.front()));
  if (home < 0) throw Error(ErrorKind::precondition, "segment does not start in a rectangle");
  const int v = mp.rectangles[home].vertical_axis;
  Vec3 S = f.metric_scale();
  for (std::size_t k = 0; k + 1 < segment.size(); ++k) {
    Vec3 d = segment[k + 1] - segment[k];
    Vec3 m{S.x * d.x, S.y * d.y, S.z * d.z};
    double len = norm(m);
    if (len == 0) throw Error(ErrorKind::invalid_curve, "segment has a repeated point");
    if (std::acos(std::min(1.0, std::abs(m[v]) / len)) > aperture + 1e-12)
      throw Error(ErrorKind::precondition, "segment is not vertical: a chord leaves the cone around the vertical axis");
  }
  if (chord_tol <= 0) {
    chord_tol = kInf;
    for (const auto& r : mp.rectangles)
      for (int a = 0; a < 3; ++a) chord_tol = std::min(chord_tol, (r.box.hi[a] - r.box.lo[a]) / 64);
  }

  Tracker tr(f, segment, chord_tol);
  // level 0: the segment itself, refined like any other iterate
  std::vector<std::vector<Sample>> pieces{{}};
  for (std::size_t k = 0; k < segment.size(); ++k) pieces[0].push_back({static_cast<double>(k), segment[k]});

  GrowthReport rep;
  int prev_total = -1;
  for (int n = 0; n <= n_max; ++n) {
    std::vector<std::vector<Sample>> next;
    tr.total_ = 0;
    for (const auto& p : pieces) tr.advance(p, n, next);
    pieces = std::move(next);

    std::vector<Polyline> curves;
    std::size_t pts = 0;
    for (const auto& p : pieces) {
      Polyline pl;
      for (const auto& s : p) pl.push_back(s.y);
      pts += pl.size();
      curves.push_back(std::move(pl));
    }
    rep.points.push_back(pts);
    std::vector<int> row(mp.size());
    int total = 0, hit = 0;
    for (std::size_t i = 0; i < mp.size(); ++i) {
      row[i] = count_crossings(f, mp, static_cast<int>(i), curves);
      total += row[i];
      hit += row[i] > 0;
    }
    rep.crossings.push_back(row);
    if (rep.n0 < 0 && hit == static_cast<int>(mp.size())) rep.n0 = n;
    if (total < prev_total) rep.monotone = false;
    prev_total = total;
    if (pieces.empty()) break;
  }
  return rep;
}

}  // namespace phmp
