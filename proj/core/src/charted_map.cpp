#include "phmp/charted_map.hpp"

#include <algorithm>
#include <random>

#include "phmp/error.hpp"

namespace phmp {

bool Box3::contains(const Vec3& p, double s) const {
  for (int i = 0; i < 3; ++i)
    if (p[i] < lo[i] - s || p[i] > hi[i] + s) return false;
  return true;
}

bool Box3::intersects(const Box3& o) const {
  for (int i = 0; i < 3; ++i)
    if (o.hi[i] < lo[i] || o.lo[i] > hi[i]) return false;
  return true;
}

Box3 Box3::intersect(const Box3& o) const {
  Box3 r;
  for (int i = 0; i < 3; ++i) {
    r.lo[i] = std::max(lo[i], o.lo[i]);
    r.hi[i] = std::min(hi[i], o.hi[i]);
  }
  return r;
}

std::optional<Vec3> ChartedMap::forward_branch(const Vec3& p, int) const { return try_forward(p); }

bool ChartedMap::smooth_near(const Vec3&, double) const { return true; }

Vec3 ChartedMap::forward(const Vec3& p) const {
  auto r = try_forward(p);
  if (!r) throw Error(ErrorKind::domain, name() + ": forward outside chart domain");
  return *r;
}

Vec3 ChartedMap::inverse(const Vec3& p) const {
  auto r = try_inverse(p);
  if (!r) throw Error(ErrorKind::domain, name() + ": point has no preimage in the chart");
  return *r;
}

double ChartedMap::lipschitz_bound() const { return lipschitz_matrix(chart().domain).frobenius(); }

Vec3 ChartedMap::wrap(const Vec3& p) const {
  const Chart& c = chart();
  Vec3 q = p;
  for (int i = 0; i < 3; ++i) {
    if (!c.periodic[i]) continue;
    double len = c.domain.hi[i] - c.domain.lo[i];
    double t = std::fmod(q[i] - c.domain.lo[i], len);
    if (t < 0) t += len;
    q[i] = c.domain.lo[i] + t;
  }
  return q;
}

Vec3 ChartedMap::difference(const Vec3& a, const Vec3& b) const {
  const Chart& c = chart();
  Vec3 d = a - b;
  for (int i = 0; i < 3; ++i) {
    if (!c.periodic[i]) continue;
    double len = c.domain.hi[i] - c.domain.lo[i];
    d[i] -= len * std::round(d[i] / len);
  }
  return d;
}

bool ChartedMap::in_domain(const Vec3& p) const {
  const Chart& c = chart();
  for (int i = 0; i < 3; ++i)
    if (!c.periodic[i] && (p[i] < c.domain.lo[i] || p[i] > c.domain.hi[i])) return false;
  return true;
}

MarkedPoint ChartedMap::marked_point(const std::string& n) const {
  for (auto& m : marked_points())
    if (m.name == n) return m;
  throw Error(ErrorKind::invalid_marker, name() + " has no marked point '" + n + "'");
}

Mat3 ChartedMap::metric_jacobian(const Vec3& p) const {
  Vec3 s = metric_scale();
  Mat3 j = jacobian(p);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) j(r, c) *= s[r] / s[c];
  return j;
}

MapCheck check_charted_map(const ChartedMap& f, int samples, std::uint64_t seed, double h,
                           const std::vector<Vec3>& extra) {
  MapCheck out;
  std::mt19937_64 rng(seed);
  const Box3& dom = f.chart().domain;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double lip = f.lipschitz_bound();

  std::vector<Vec3> pts;
  for (int k = 0; k < samples; ++k) {
    Vec3 p;
    for (int i = 0; i < 3; ++i) p[i] = dom.lo[i] + u01(rng) * (dom.hi[i] - dom.lo[i]);
    pts.push_back(p);
  }
  pts.insert(pts.end(), extra.begin(), extra.end());

  for (const Vec3& p : pts) {
    auto fp = f.try_forward(p);
    if (!fp) continue;
    ++out.samples;
    if (auto back = f.try_inverse(*fp)) {
      out.max_inverse_error = std::max(out.max_inverse_error, norm(f.difference(*back, p)));
    } else {
      out.max_inverse_error = std::max(out.max_inverse_error, 1.0);
    }

    if (!f.smooth_near(p, 2 * h)) {
      ++out.skipped_nonsmooth;
    } else {
      Mat3 j = f.jacobian(p), fd;
      bool ok = true;
      for (int c = 0; c < 3 && ok; ++c) {
        Vec3 e;
        e[c] = h;
        auto a = f.try_forward(p + e), b = f.try_forward(p - e);
        if (!a || !b) { ok = false; break; }
        Vec3 col = f.difference(*a, *b) / (2 * h);
        for (int r = 0; r < 3; ++r) fd(r, c) = col[r];
      }
      if (ok) {
        double rel = max_abs_entry(fd - j) / std::max(1.0, max_abs_entry(j));
        if (rel > out.max_jacobian_rel_error) {
          out.max_jacobian_rel_error = rel;
          out.worst_jacobian_point = p;
        }
      } else {
        ++out.skipped_nonsmooth;
      }
    }

    Vec3 d{u01(rng) - 0.5, u01(rng) - 0.5, u01(rng) - 0.5};
    d = 0.05 * u01(rng) * d;
    if (norm(d) > 0) {
      if (auto fq = f.try_forward(p + d); fq && f.smooth_near(p, norm(d))) {
        double ratio = norm(f.difference(*fq, *fp)) / (lip * norm(d));
        out.max_lipschitz_ratio = std::max(out.max_lipschitz_ratio, ratio);
      }
    }
  }
  out.pass = out.max_inverse_error <= 1e-10 && out.max_jacobian_rel_error <= 1e-5 && out.max_lipschitz_ratio <= 1.0;
  return out;
}

}  // namespace phmp
