#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <nlohmann/json.hpp>

#include "phmp/error.hpp"
#include "phmp/hyperbolicity.hpp"
#include "phmp/parallel.hpp"

namespace phmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec3 axis_vec(int a) {
  Vec3 v{0, 0, 0};
  v[a] = 1;
  return v;
}

int axis_of(const std::string& s) {
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  return -1;
}

template <class T>
const T& lookup(const ChartedMap& f, const std::optional<BoxGrid>& grid, const std::vector<T>& v, const Vec3& p,
                const std::string& name) {
  if (!grid) return v.front();
  auto idx = grid->locate(f.wrap(p));
  if (!idx) throw Error(ErrorKind::coverage, "field " + name + " is undefined at the image point");
  return v[*idx];
}

}  // namespace

const Cone& ConeField::at(const ChartedMap& f, const Vec3& p) const { return lookup(f, grid, cones, p, name); }
const Plane& PlaneField::at(const ChartedMap& f, const Vec3& p) const { return lookup(f, grid, planes, p, name); }

ConeField uniform_cone_field(const std::string& name, const Cone& c) {
  validate(c);
  return {name, std::nullopt, {c}};
}

ConeField tabulated_cone_field(const std::string& name, const BoxGrid& grid, std::vector<Cone> cones) {
  if (static_cast<int>(cones.size()) != grid.size())
    throw Error(ErrorKind::invalid_cone, "cone table size does not match the grid");
  for (const auto& c : cones) validate(c);
  for (int i = 0; i < grid.size(); ++i) {
    auto c = grid.coords(i);
    for (int a = 0; a < 3; ++a) {
      if (c[a] + 1 >= grid.n[a]) continue;
      auto q = c;
      ++q[a];
      Vec3 u = cone_axis(cones[i]), w = cone_axis(cones[grid.index(q[0], q[1], q[2])]);
      // axes are lines: compare up to sign
      if (std::acos(std::min(1.0, std::abs(dot(u, w)))) >= deg(30))
        throw Error(ErrorKind::invalid_cone, "cone axis jumps by 30 degrees or more between neighbouring boxes");
    }
  }
  return {name, grid, std::move(cones)};
}

ConeField named_cone_field(const std::string& name, double aperture) {
  Vec3 axis;
  if (name == "solenoid-theta-cone") axis = {1, 0, 0};
  else if (name == "vertical-cone") axis = {0, 0, 1};
  else if (name.rfind("axis-", 0) == 0 && axis_of(name.substr(5)) >= 0) axis = axis_vec(axis_of(name.substr(5)));
  else throw Error(ErrorKind::usage, "unknown cone field '" + name + "'");
  return uniform_cone_field(name, circular_cone(axis, aperture));
}

PlaneField uniform_plane_field(const std::string& name, const Plane& p) { return {name, std::nullopt, {p}}; }

PlaneField named_plane_field(const std::string& name) {
  Vec3 n;
  if (name == "fiber-plane") n = {1, 0, 0};
  else if (name == "xy-plane") n = {0, 0, 1};
  else if (name.rfind("plane-", 0) == 0 && axis_of(name.substr(6)) >= 0) n = axis_vec(axis_of(name.substr(6)));
  else throw Error(ErrorKind::usage, "unknown plane field '" + name + "'");
  return uniform_plane_field(name, make_plane(n));
}

// ---------- cone certificates

namespace {

struct BoxResult {
  int points = 0, escaped = 0;
  double slack = kInf, expansion = kInf;
  Vec3 slack_at, expansion_at, slack_vec, expansion_vec;
};

std::vector<Vec3> lattice(const Box3& b, int samples) {
  int k = std::max(1, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(samples)) - 1e-9)));
  std::vector<Vec3> pts;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l) {
        Vec3 t{(i + 0.5) / k, (j + 0.5) / k, (l + 0.5) / k};
        pts.push_back({b.lo.x + t.x * (b.hi.x - b.lo.x), b.lo.y + t.y * (b.hi.y - b.lo.y),
                       b.lo.z + t.z * (b.hi.z - b.lo.z)});
      }
  return pts;
}

bool in_region(const ChartedMap& f, const BoxSet& region, const Vec3& y) {
  auto idx = region.grid.locate(f.wrap(y));
  return idx && region.contains(*idx);
}

void check_point(const ChartedMap& f, const BoxSet& region, const ConeField& cf, const CertifyOptions& opt,
                 bool expansion, const Vec3& x, BoxResult& r) {
  auto y = f.try_forward(x);
  if (!y || !in_region(f, region, *y)) {
    ++r.escaped;
    return;
  }
  ++r.points;
  Mat3 jm = f.metric_jacobian(x);
  const Cone& src = cf.at(f, x);
  const Cone& dst = cf.at(f, *y);
  double s = angular_slack(dst, jm * cone_axis(src));
  Vec3 sv = cone_axis(src);
  for (const Vec3& v : boundary_rays(src, opt.cone_samples)) {
    double t = angular_slack(dst, jm * v);
    if (t < s) {
      s = t;
      sv = v;
    }
  }
  if (s < r.slack) {
    r.slack = s;
    r.slack_at = x;
    r.slack_vec = sv;
  }
  if (!expansion) return;
  for (const Vec3& v : interior_rays(src, opt.rings, opt.azimuths)) {
    double e = norm(jm * v);
    if (e < r.expansion) {
      r.expansion = e;
      r.expansion_at = x;
      r.expansion_vec = v;
    }
  }
}

ConeCertificate certify(const ChartedMap& f, const BoxSet& region, const ConeField& cf, const CertifyOptions& opt,
                        bool expansion) {
  if (region.empty()) throw Error(ErrorKind::invalid_parameters, "certification region is empty");
  if (!(opt.margin > 0)) throw Error(ErrorKind::invalid_parameters, "margin must be positive");
  if (expansion && !(opt.expansion_floor > 1)) throw Error(ErrorKind::invalid_parameters, "expansion floor must exceed 1");
  if (opt.samples_per_box < 1 || opt.cone_samples < 16) throw Error(ErrorKind::invalid_parameters, "too few samples");

  // hints are attached to the box that contains them
  std::vector<std::vector<Vec3>> hints(region.size());
  for (const Vec3& h : f.sample_hints()) {
    auto idx = region.grid.locate(f.wrap(h));
    if (!idx) continue;
    auto it = std::lower_bound(region.boxes.begin(), region.boxes.end(), *idx);
    if (it != region.boxes.end() && *it == *idx) hints[it - region.boxes.begin()].push_back(f.wrap(h));
  }
  std::vector<BoxResult> per(region.size());
  parallel_for(region.size(), [&](std::size_t b) {
    Box3 box = region.grid.cell(region.boxes[b]);
    for (const Vec3& x : lattice(box, opt.samples_per_box)) check_point(f, region, cf, opt, expansion, x, per[b]);
    for (const Vec3& x : hints[b]) check_point(f, region, cf, opt, expansion, x, per[b]);
  });

  ConeCertificate c;
  c.kind = expansion ? "unstable" : "dominated";
  c.field = cf.name;
  c.boxes = static_cast<int>(region.size());
  c.margin = opt.margin;
  c.expansion_floor = expansion ? opt.expansion_floor : 0;
  c.min_slack = kInf;
  c.min_expansion = kInf;
  for (const auto& r : per) {
    c.points += r.points;
    c.escaped += r.escaped;
    if (r.slack < c.min_slack) {
      c.min_slack = r.slack;
      c.worst_slack_point = r.slack_at;
      if (!expansion) c.witness = r.slack_vec;
    }
    if (expansion && r.expansion < c.min_expansion) {
      c.min_expansion = r.expansion;
      c.worst_expansion_point = r.expansion_at;
    }
  }
  if (expansion) {
    // witness: the violating vector if there is one, else the weakest one
    bool cone_fail = c.min_slack < opt.margin;
    for (const auto& r : per) {
      if (cone_fail && r.slack == c.min_slack) {
        c.witness = r.slack_vec;
        break;
      }
      if (!cone_fail && r.expansion == c.min_expansion) {
        c.witness = r.expansion_vec;
        break;
      }
    }
  }
  if (c.points == 0) {
    c.pass = false;
    return c;
  }
  c.pass = c.min_slack >= opt.margin && (!expansion || c.min_expansion >= opt.expansion_floor);
  return c;
}

}  // namespace

ConeCertificate certify_unstable_cones(const ChartedMap& f, const BoxSet& region, const ConeField& cf,
                                       const CertifyOptions& opt) {
  return certify(f, region, cf, opt, true);
}

ConeCertificate certify_dominated(const ChartedMap& f, const BoxSet& region, const ConeField& cf,
                                  const CertifyOptions& opt) {
  return certify(f, region, cf, opt, false);
}

// ---------- normal-bundle cocycle

NormalStep normal_step(const Mat3& jm, const Plane& p, const Plane& q, const Vec3& eu) {
  NormalStep s;
  s.matrix = restricted_matrix(jm, p, q, eu);
  s.det = s.matrix.det();
  return s;
}

NormalStep normal_cocycle_step(const ChartedMap& f, const PlaneField& pf, const ConeField& cf, const Vec3& x) {
  Vec3 y = f.forward(x);
  const Plane& p = pf.at(f, x);
  const Plane& q = pf.at(f, y);
  Vec3 eu_x = cone_axis(cf.at(f, x));
  if (std::abs(dot(normalized(eu_x), p.normal)) <= 1e-9)
    throw Error(ErrorKind::projection_degenerate, "unstable direction lies in the plane field at x");
  return normal_step(f.metric_jacobian(x), p, q, cone_axis(cf.at(f, y)));
}

double composition_identity_error(std::uint64_t seed, int trials) {
  if (trials < 1) throw Error(ErrorKind::invalid_parameters, "need at least one trial");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto vec = [&]() { return Vec3{g(rng), g(rng), g(rng)}; };
  auto mat = [&]() {
    Mat3 m;
    for (double& e : m.a) e = g(rng);
    return m;
  };
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    Plane p1 = make_plane(vec()), p2 = make_plane(vec()), p3 = make_plane(vec());
    Vec3 e2 = normalized(vec()), e3 = normalized(vec());
    // keep the transversals away from their planes
    if (std::abs(dot(e2, p2.normal)) < 0.2 || std::abs(dot(e3, p3.normal)) < 0.2) {
      --t;
      continue;
    }
    Mat3 F = mat(), H = mat();
    // make H carry e2 onto a multiple of e3
    Vec3 fix = 1.7 * e3 - H * e2;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) H(r, c) += fix[r] * e2[c];
    Mat2 two = restricted_matrix(H, p2, p3, e3) * restricted_matrix(F, p1, p2, e2);
    Mat2 one = restricted_matrix(H * F, p1, p3, e3);
    double scale = std::max(1.0, max_abs_entry(one));
    worst = std::max(worst, max_abs_entry(two - one) / scale);
  }
  return worst;
}

VolumeCertificate certify_volume_hyperbolic(const ChartedMap& f, const BoxSet& region, const PlaneField& pf,
                                            const ConeField& cf, const ConeCertificate& unstable,
                                            const VolumeOptions& opt) {
  if (unstable.kind != "unstable" || !unstable.pass)
    throw Error(ErrorKind::precondition, "volume hyperbolicity needs a passing unstable-cone certificate");
  if (unstable.field != cf.name)
    throw Error(ErrorKind::precondition, "unstable certificate was issued for a different cone field");
  if (!(opt.lambda_bar > 0 && opt.lambda_bar < 1)) throw Error(ErrorKind::invalid_parameters, "lambda_bar must be in (0, 1)");
  if (opt.orbit_len < 1 || opt.orbits < 1) throw Error(ErrorKind::invalid_parameters, "orbit length and count must be positive");
  if (region.empty()) throw Error(ErrorKind::invalid_parameters, "region is empty");

  VolumeCertificate c;
  c.lambda_bar = opt.lambda_bar;
  c.orbits = opt.orbits;
  c.cone_floor = unstable.min_expansion;
  c.min_expansion = kInf;

  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<std::size_t> pick(0, region.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int o = 0; o < opt.orbits; ++o) {
    Box3 b = region.grid.cell(region.boxes[pick(rng)]);
    Vec3 x;
    for (int a = 0; a < 3; ++a) x[a] = b.lo[a] + unit(rng) * (b.hi[a] - b.lo[a]);
    for (int k = 0; k < opt.orbit_len; ++k) {
      auto y = f.try_forward(x);
      if (!y || !in_region(f, region, *y)) {
        ++c.truncated;
        break;
      }
      Vec3 fy = f.wrap(*y);
      Mat3 jm = f.metric_jacobian(x);
      Vec3 eu_y = normalized(cone_axis(cf.at(f, fy)));
      NormalStep s = normal_step(jm, pf.at(f, x), pf.at(f, fy), eu_y);
      ++c.steps;
      if (std::abs(s.det) > c.max_det) {
        c.max_det = std::abs(s.det);
        c.worst_det_point = x;
      }
      Vec3 pushed = jm * normalized(cone_axis(cf.at(f, x)));
      c.min_expansion = std::min(c.min_expansion, norm(pushed));
      c.axis_spread = std::max(c.axis_spread, std::acos(std::min(1.0, std::abs(dot(normalized(pushed), eu_y)))));
      x = fy;
    }
  }
  c.pass = c.steps > 0 && c.max_det <= opt.lambda_bar && c.min_expansion > 1 && c.cone_floor > 1;
  return c;
}

// ---------- large stable manifold

StableManifoldVerdict check_large_stable_manifold(const ChartedMap& f, const MarkovPartition& mp,
                                                  const std::string& point, const StableManifoldOptions& opt) {
  if (opt.angles < 1 || opt.iterations < 1 || !(opt.tol > 0) || !(opt.min_radius > 0))
    throw Error(ErrorKind::invalid_parameters, "bad stable manifold sampling parameters");
  MarkedPoint m = f.marked_point(point);
  if (!m.disc) throw Error(ErrorKind::invalid_marker, "marked point " + point + " has no centre-stable disc");
  if (m.period < 1) throw Error(ErrorKind::invalid_marker, "marked point " + point + " has no period");
  std::vector<Vec3> orbit{m.position};
  for (int k = 1; k <= m.period; ++k) {
    auto y = f.try_forward(orbit.back());
    if (!y) throw Error(ErrorKind::invalid_marker, "orbit of " + point + " leaves the chart");
    orbit.push_back(f.wrap(*y));
  }
  if (norm(f.difference(orbit.back(), m.position)) > 1e-9)
    throw Error(ErrorKind::invalid_marker, point + " is not periodic with period " + std::to_string(m.period));
  orbit.pop_back();

  StableManifoldVerdict v;
  v.point = point;
  v.period = m.period;
  const FlatDisc& d = m.disc.value();
  const int a = (d.normal_axis + 1) % 3, b = (d.normal_axis + 2) % 3;
  // rings around the disc centre and around the point itself, radii halving down to min_radius
  std::vector<Vec3> base;
  auto rings = [&](const Vec3& c, double r0) {
    base.push_back(c);
    for (double r = r0; r >= opt.min_radius; r /= 2)
      for (int k = 0; k < opt.angles; ++k) {
        double t = 2 * kPi * (k + 0.5 * (static_cast<int>(std::log2(r0 / r)) % 2)) / opt.angles;
        Vec3 q = c;
        q[a] += r * std::cos(t);
        q[b] += r * std::sin(t);
        if (std::hypot(q[a] - d.center[a], q[b] - d.center[b]) <= d.radius * (1 - 1e-9)) base.push_back(q);
      }
  };
  rings(d.center, d.radius * (1 - 1e-9));
  Vec3 p0 = d.center;
  p0[a] = m.position[a];
  p0[b] = m.position[b];
  rings(p0, d.radius);

  auto step = [&](Vec3 q) -> std::optional<Vec3> {
    for (int s = 0; s < m.period; ++s) {
      auto y = f.try_forward(q);
      if (!y) return std::nullopt;
      q = f.wrap(*y);
      if (!in_family(f, mp, q)) return std::nullopt;
    }
    return q;
  };

  for (int k = 0; k < m.period; ++k) {
    for (Vec3 q0 : base) {
      // the disc through the k-th orbit point is the image of the base disc
      std::optional<Vec3> q = f.wrap(q0);
      for (int s = 0; s < k && q; ++s) q = f.try_forward(*q);
      if (!q) continue;
      ++v.samples;
      Vec3 start = *q;
      if (!in_family(f, mp, start)) {
        ++v.escaped;
        if (v.reason.empty()) {
          v.reason = "disc point outside the rectangle family";
          v.witness = start;
        }
        continue;
      }
      bool escaped = false;
      for (int it = 0; it < opt.iterations && !escaped; ++it) {
        q = step(*q);
        escaped = !q;
      }
      if (escaped) {
        ++v.escaped;
        if (v.reason.empty()) {
          v.reason = "orbit of a disc point leaves the rectangle family";
          v.witness = start;
        }
        continue;
      }
      double dist = norm(f.difference(*q, orbit[k]));
      if (dist > v.worst_distance) {
        v.worst_distance = dist;
        if (dist > opt.tol && v.reason.empty()) {
          v.reason = "disc point does not converge to the orbit";
          v.witness = start;
        }
      }
      if (dist > opt.tol) ++v.unconverged;
    }
  }
  v.pass = v.samples > 0 && v.escaped == 0 && v.unconverged == 0;
  return v;
}

// ---------- json

namespace {
nlohmann::json vj(const Vec3& v) { return {v.x, v.y, v.z}; }
double finite(double x) { return std::isfinite(x) ? x : 0.0; }
}  // namespace

nlohmann::json to_json(const ConeCertificate& c) {
  nlohmann::json j{{"kind", c.kind},
                   {"field", c.field},
                   {"boxes", c.boxes},
                   {"points", c.points},
                   {"escaped", c.escaped},
                   {"margin_deg", c.margin * 180 / kPi},
                   {"min_slack_deg", finite(c.min_slack) * 180 / kPi},
                   {"worst_slack_point", vj(c.worst_slack_point)},
                   {"witness", vj(c.witness)},
                   {"pass", c.pass}};
  if (c.kind == "unstable") {
    j["expansion_floor"] = c.expansion_floor;
    j["min_expansion"] = finite(c.min_expansion);
    j["worst_expansion_point"] = vj(c.worst_expansion_point);
  }
  return j;
}

nlohmann::json to_json(const VolumeCertificate& c) {
  return {{"lambda_bar", c.lambda_bar},      {"orbits", c.orbits},
          {"steps", c.steps},                {"truncated", c.truncated},
          {"max_det", c.max_det},            {"worst_det_point", vj(c.worst_det_point)},
          {"min_expansion", finite(c.min_expansion)}, {"cone_floor", finite(c.cone_floor)},
          {"axis_spread_deg", c.axis_spread * 180 / kPi}, {"pass", c.pass}};
}

nlohmann::json to_json(const StableManifoldVerdict& v) {
  nlohmann::json j{{"point", v.point},         {"period", v.period},           {"samples", v.samples},
                   {"escaped", v.escaped},     {"unconverged", v.unconverged}, {"worst_distance", v.worst_distance},
                   {"pass", v.pass}};
  if (!v.pass) {
    j["reason"] = v.reason;
    j["witness"] = vj(v.witness);
  }
  return j;
}

}  // namespace phmp
