#include <algorithm>
#include <cmath>
#include <limits>

#include "phmp/error.hpp"
#include "phmp/surgery.hpp"

namespace phmp {

GammaHat::GammaHat(ModificationFamily fam, Chi chi) : fam_(fam), chi_(std::move(chi)) {}

int GammaHat::region(const Vec3& p) const {
  if (std::abs(p.x) > 1 || std::abs(p.y) > 1 || std::abs(p.z) > 1) return 0;
  double s = alpha() / 2;
  double r = std::hypot(p.x, p.y);
  if (r <= s) return std::abs(p.z) <= s ? 1 : 2;
  return 3;
}

Vec3 GammaHat::tilde(const ModificationFamily& fam, const Vec3& q, Mat3* jac) {
  double t = bump_rho(q.z);
  if (t == 0 || std::hypot(q.x, q.y) >= 1) {
    if (jac) *jac = Mat3::identity();
    return q;
  }
  FlowResult fr = hamiltonian_flow(fam, t, {q.x, q.y});
  if (jac) {
    // d/dz Gamma_{rho(z)} = rho'(z) T V(Gamma)
    auto v = fam.field(fr.point[0], fr.point[1]);
    double c = bump_rho_prime(q.z) * fam.total_time();
    *jac = {{fr.jacobian(0, 0), fr.jacobian(0, 1), c * v[0], fr.jacobian(1, 0), fr.jacobian(1, 1), c * v[1], 0, 0, 1}};
  }
  return {fr.point[0], fr.point[1], q.z};
}

Vec3 GammaHat::tilde_scaled(const Vec3& p, Mat3* jac) const {
  double s = alpha() / 2;
  return s * tilde(fam_, p / s, jac);
}

Vec3 GammaHat::lift(const Vec3& p, Mat3* jac) const {
  double r = std::hypot(p.x, p.y);
  double rho = bump_rho(r);
  double cz = chi_(p.z);
  if (jac) {
    double r1 = bump_rho_prime(r);
    double c0 = 0, c1 = 0;
    if (r > 0 && r1 != 0) {
      c0 = r1 * p.x / r * (cz - p.z);
      c1 = r1 * p.y / r * (cz - p.z);
    }
    double d = rho * chi_.derivative(p.z) + 1 - rho;
    *jac = {{1, 0, 0, 0, 1, 0, c0, c1, d}};
  }
  return {p.x, p.y, rho * cz + (1 - rho) * p.z};
}

Vec3 GammaHat::lift_inverse(const Vec3& q) const {
  if (std::abs(q.z) >= 1) return q;
  double rho = bump_rho(std::hypot(q.x, q.y));
  if (rho == 0) return q;
  auto g = [&](double z) { return rho * chi_(z) + (1 - rho) * z - q.z; };
  double lo = -1, hi = 1, z = q.z;
  // bracketed newton; g is increasing
  for (int it = 0; it < 200; ++it) {
    double gz = g(z);
    if (gz == 0) break;
    if (gz > 0) hi = z; else lo = z;
    double d = rho * chi_.derivative(z) + 1 - rho;
    double zn = z - gz / d;
    if (!(zn > lo && zn < hi)) zn = 0.5 * (lo + hi);
    if (std::abs(zn - z) <= 1e-17 + 1e-16 * std::abs(z)) {
      z = zn;
      break;
    }
    z = zn;
  }
  return {q.x, q.y, z};
}

Vec3 GammaHat::apply(const Vec3& p) const {
  if (region(p) == 0) throw Error(ErrorKind::domain, "gamma-hat evaluated outside [-1,1]^3");
  return lift(tilde_scaled(p, nullptr), nullptr);
}

Vec3 GammaHat::apply_inverse(const Vec3& q) const {
  if (region(q) == 0) throw Error(ErrorKind::domain, "gamma-hat inverse outside [-1,1]^3");
  Vec3 y = lift_inverse(q);
  double s = alpha() / 2;
  Vec3 u = y / s;
  double t = bump_rho(u.z);
  if (t == 0) return y;
  auto back = hamiltonian_flow_inverse(fam_, t, {u.x, u.y});
  return s * Vec3{back[0], back[1], u.z};
}

Mat3 GammaHat::jacobian(const Vec3& p) const {
  if (region(p) == 0) throw Error(ErrorKind::domain, "gamma-hat jacobian outside [-1,1]^3");
  Mat3 dt, dl;
  Vec3 y = tilde_scaled(p, &dt);
  lift(y, &dl);
  return dl * dt;
}

Mat3 GammaHat::block_jacobian(const Vec3& p) const {
  switch (region(p)) {
    case 1: {
      Mat3 dt;
      tilde_scaled(p, &dt);
      Mat3 m = dt;
      m(2, 0) = 0;
      m(2, 1) = 0;
      m(2, 2) = K();
      return m;
    }
    case 2: return Mat3::diag(1, 1, chi_.derivative(p.z));
    case 3: {
      auto c = c_row(p);
      double rho = bump_rho(std::hypot(p.x, p.y));
      double d = rho * chi_.derivative(p.z) + 1 - rho;
      return {{1, 0, 0, 0, 1, 0, c[0], c[1], d}};
    }
  }
  throw Error(ErrorKind::domain, "gamma-hat block form outside [-1,1]^3");
}

std::array<double, 2> GammaHat::c_row(const Vec3& p) const {
  if (region(p) != 3) return {0, 0};
  double r = std::hypot(p.x, p.y);
  double k = bump_rho_prime(r) * (chi_(p.z) - p.z) / r;
  return {k * p.x, k * p.y};
}

bool GammaHat::smooth_near(const Vec3& p, double radius) const {
  if (std::hypot(p.x, p.y) - radius >= 1) return true;
  for (double k : chi_.kinks())
    if (std::abs(p.z - k) <= radius) return false;
  return true;
}

// ---- certification

namespace {

std::vector<double> z_levels(double lo, double alpha, int n) {
  // half the levels resolve the alpha scale, the rest spread to 1
  std::vector<double> out;
  int a = n / 2, b = n - a;
  double top = std::min(4 * alpha, 0.5);
  for (int i = 0; i < a; ++i) out.push_back(lo + (top - lo) * (i + 0.5) / a);
  for (int i = 0; i < b; ++i) out.push_back(top + (1 - top) * (i + 0.5) / b);
  for (size_t i = 0; i < out.size(); i += 2) out[i] = -out[i];
  return out;
}

std::vector<Vec3> region_points(int region, double alpha, int n) {
  std::vector<Vec3> pts;
  double s = alpha / 2;
  if (region == 1) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          Vec3 q{-1 + 2.0 * i / (n - 1), -1 + 2.0 * j / (n - 1), -1 + 2.0 * k / (n - 1)};
          if (q.x * q.x + q.y * q.y <= 1) pts.push_back(s * q);
        }
  } else if (region == 2) {
    auto zs = z_levels(s, alpha, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double x = s * (-1 + 2.0 * i / (n - 1)), y = s * (-1 + 2.0 * j / (n - 1));
        if (x * x + y * y > s * s) continue;
        for (double z : zs) pts.push_back({x, y, z});
      }
  } else {
    std::vector<double> rs;
    int a = n / 3;
    for (int i = 0; i < a; ++i) rs.push_back(s * (1 + 3.0 * (i + 1) / a));
    for (int i = 0; i < n - a; ++i) rs.push_back(std::max(4 * s, 0.5) + (1 - std::max(4 * s, 0.5)) * i / (n - a - 1));
    std::vector<double> zs = z_levels(0, alpha, n);
    for (double r : rs)
      for (int j = 0; j < n; ++j) {
        double a2 = 2 * kPi * (j + 0.25) / n;
        for (double z : zs) pts.push_back({r * std::cos(a2), r * std::sin(a2), z});
      }
  }
  return pts;
}

void score(RegionMargin& m, const Mat3& j, const Vec3& p, const Cone& inner, const Cone& outer,
           const std::vector<Vec3>& outer_units, const TuneOptions& opt, bool area) {
  double slack = containment_slack(push_forward(j, inner), outer, opt.cone_samples);
  double ex = std::numeric_limits<double>::infinity();
  for (const Vec3& u : outer_units) ex = std::min(ex, norm(j * u));
  if (m.samples == 0 || slack < m.min_slack) {
    m.min_slack = slack;
    m.worst_point = p;
  }
  if (m.samples == 0 || ex < m.min_expansion) m.min_expansion = ex;
  if (area) {
    double a = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
    m.max_area_defect = std::max(m.max_area_defect, std::abs(a - 1));
  }
  ++m.samples;
}

bool region_ok(const RegionMargin& m, double eta, const TuneOptions& opt, bool area) {
  return m.min_slack >= opt.margin && m.min_expansion > 1 - eta && (!area || m.max_area_defect < eta);
}

void check_precondition(const Cone& inner, const Cone& outer, double eta) {
  if (!(eta > 0 && eta < 1)) throw Error(ErrorKind::precondition, "eta must lie in (0, 1)");
  validate(inner);
  validate(outer);
  if (!cone_strictly_contained(inner, outer))
    throw Error(ErrorKind::precondition, "inner cone is not strictly inside the outer cone");
  Vec3 ez{0, 0, 1};
  for (const Cone* c : {&inner, &outer}) {
    if (!contains(*c, ez)) throw Error(ErrorKind::precondition, "cones must contain e_z");
    // transverse to the xy-plane: no horizontal ray inside
    for (int k = 0; k < 72; ++k) {
      double a = 2 * kPi * k / 72;
      if (contains(*c, {std::cos(a), std::sin(a), 0}))
        throw Error(ErrorKind::precondition, "cone meets the xy-plane");
    }
  }
}

}  // namespace

GammaHatCertificate certify_gamma_hat(const GammaHat& g, const Cone& inner, const Cone& outer, double eta,
                                      const TuneOptions& opt) {
  GammaHatCertificate cert;
  cert.K = g.K();
  cert.delta = g.delta();
  cert.alpha = g.alpha();
  cert.eta = eta;
  cert.c_bound = 2 * g.alpha() * g.K() * kBumpSlopeMax;
  auto units = interior_rays(outer, 4, 24);
  for (int r = 1; r <= 3; ++r) {
    RegionMargin& m = cert.regions[r - 1];
    m.region = r;
    for (const Vec3& p : region_points(r, g.alpha(), opt.grid)) {
      Mat3 j = g.jacobian(p);
      score(m, j, p, inner, outer, units, opt, r != 3);
      for (int i = 0; i < 9; ++i) cert.max_abs_jacobian.a[i] = std::max(cert.max_abs_jacobian.a[i], std::abs(j.a[i]));
      if (r == 3) {
        auto c = g.c_row(p);
        cert.max_c_norm = std::max(cert.max_c_norm, std::hypot(c[0], c[1]));
      }
    }
  }
  cert.pass = cert.max_c_norm <= cert.c_bound;
  for (int r = 0; r < 3; ++r) cert.pass = cert.pass && region_ok(cert.regions[r], eta, opt, r != 2);
  return cert;
}

TunedGammaHat tune_gamma_hat(const Cone& inner, const Cone& outer, double eta, const ModificationFamily& fam,
                             const TuneOptions& opt) {
  check_precondition(inner, outer, eta);
  auto units = interior_rays(outer, 4, 24);

  // core-cylinder derivatives do not depend on K, delta or alpha once written in scaled coordinates
  auto core = region_points(1, 2.0, opt.grid);
  std::vector<Mat3> core_jac(core.size());
  for (size_t i = 0; i < core.size(); ++i) GammaHat::tilde(fam, core[i], &core_jac[i]);

  int attempts = 0;
  std::string last_failure = "core";
  double K = 2;
  for (int kd = 0; kd < opt.max_k_doublings; ++kd, K *= 2) {
    RegionMargin r1;
    r1.region = 1;
    for (size_t i = 0; i < core.size(); ++i) {
      Mat3 j = core_jac[i];
      j(2, 2) = K;
      score(r1, j, core[i], inner, outer, units, opt, true);
    }
    ++attempts;
    if (!region_ok(r1, eta, opt, true)) continue;

    double delta = eta;
    for (int dd = 0; dd < opt.max_delta_halvings; ++dd, delta /= 2) {
      double amax;
      try {
        amax = alpha_max(K, delta);
      } catch (const Error&) {
        last_failure = "chi";
        continue;
      }
      double alpha = amax;
      for (int ad = 0; ad < opt.max_alpha_halvings; ++ad, alpha /= 2) {
        ++attempts;
        GammaHat g(fam, Chi(K, delta, alpha));
        RegionMargin r2, r3;
        r2.region = 2;
        r3.region = 3;
        for (const Vec3& p : region_points(2, alpha, opt.grid)) score(r2, g.jacobian(p), p, inner, outer, units, opt, true);
        if (!region_ok(r2, eta, opt, true)) {
          // the tube region only sees chi', shrinking alpha will not help
          last_failure = "tube";
          break;
        }
        double cmax = 0;
        for (const Vec3& p : region_points(3, alpha, opt.grid)) {
          score(r3, g.jacobian(p), p, inner, outer, units, opt, false);
          auto c = g.c_row(p);
          cmax = std::max(cmax, std::hypot(c[0], c[1]));
        }
        if (!region_ok(r3, eta, opt, false) || cmax > 2 * alpha * K * kBumpSlopeMax) {
          last_failure = "outer";
          continue;
        }
        TunedGammaHat out;
        out.kernel = std::make_shared<GammaHat>(fam, Chi(K, delta, alpha));
        GammaHatCertificate& cert = out.certificate;
        cert.K = K;
        cert.delta = delta;
        cert.alpha = alpha;
        cert.eta = eta;
        // core margins in chart units
        r1.worst_point = (alpha / 2) * r1.worst_point;
        cert.regions = {r1, r2, r3};
        cert.max_c_norm = cmax;
        cert.c_bound = 2 * alpha * K * kBumpSlopeMax;
        for (size_t i = 0; i < core.size(); ++i) {
          Mat3 j = core_jac[i];
          j(2, 2) = K;
          for (int e = 0; e < 9; ++e) cert.max_abs_jacobian.a[e] = std::max(cert.max_abs_jacobian.a[e], std::abs(j.a[e]));
        }
        for (int rr = 2; rr <= 3; ++rr)
          for (const Vec3& p : region_points(rr, alpha, opt.grid)) {
            Mat3 j = g.jacobian(p);
            for (int e = 0; e < 9; ++e) cert.max_abs_jacobian.a[e] = std::max(cert.max_abs_jacobian.a[e], std::abs(j.a[e]));
          }
        cert.attempts = attempts;
        cert.pass = true;
        return out;
      }
    }
  }
  throw Error(ErrorKind::unattainable_parameters, "gamma-hat search exhausted; failing region: " + last_failure);
}

}  // namespace phmp
