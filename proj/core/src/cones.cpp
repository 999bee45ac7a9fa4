#include "phmp/cones.hpp"

#include <algorithm>
#include <limits>

#include "phmp/error.hpp"

namespace phmp {

namespace {

std::pair<Vec3, Vec3> perp_basis(const Vec3& axis) { return plane_basis(make_plane(axis)); }

// Q(v) = |w_z|^2 - |w_xy|^2 with w = F^-1 v
double quad(const Mat3& inv, const Vec3& v) {
  Vec3 w = inv * v;
  return w.z * w.z - w.x * w.x - w.y * w.y;
}
double bilin(const Mat3& inv, const Vec3& v, const Vec3& u) {
  Vec3 a = inv * v, b = inv * u;
  return a.z * b.z - a.x * b.x - a.y * b.y;
}

}  // namespace

void validate(const Cone& c) {
  if (auto* cc = std::get_if<CircularCone>(&c)) {
    if (!(cc->aperture > 0) || !(cc->aperture < kPi / 2))
      throw Error(ErrorKind::invalid_cone, "aperture must lie in (0, pi/2)");
    if (!(norm(cc->axis) > 0)) throw Error(ErrorKind::invalid_cone, "zero cone axis");
  } else {
    const auto& ic = std::get<LinearImageCone>(c);
    if (is_singular(ic.frame)) throw Error(ErrorKind::invalid_cone, "singular cone frame");
  }
}

CircularCone circular_cone(const Vec3& axis, double aperture) {
  CircularCone c;
  if (!(norm(axis) > 0)) throw Error(ErrorKind::invalid_cone, "zero cone axis");
  c.axis = normalized(axis);
  c.aperture = aperture;
  validate(c);
  return c;
}

LinearImageCone image_cone(const Mat3& frame) {
  if (is_singular(frame)) throw Error(ErrorKind::invalid_cone, "singular cone frame");
  return {frame, inverse(frame)};
}

bool contains(const Cone& c, const Vec3& v) {
  if (auto* cc = std::get_if<CircularCone>(&c))
    return std::abs(dot(v, cc->axis)) >= std::cos(cc->aperture) * norm(v);
  const auto& ic = std::get<LinearImageCone>(c);
  Vec3 w = ic.inverse * v;
  return std::abs(w.z) >= std::hypot(w.x, w.y);
}

Mat3 cone_frame(const Cone& c) {
  if (auto* cc = std::get_if<CircularCone>(&c)) {
    auto [u, v] = perp_basis(cc->axis);
    double t = std::tan(cc->aperture);
    return Mat3::from_columns(t * u, t * v, cc->axis);
  }
  return std::get<LinearImageCone>(c).frame;
}

Vec3 cone_axis(const Cone& c) {
  if (auto* cc = std::get_if<CircularCone>(&c)) return cc->axis;
  return normalized(std::get<LinearImageCone>(c).frame.column(2));
}

LinearImageCone push_forward(const Mat3& l, const Cone& c) { return image_cone(l * cone_frame(c)); }

std::vector<Vec3> boundary_rays(const Cone& c, int samples) {
  Mat3 f = cone_frame(c);
  std::vector<Vec3> out;
  out.reserve(samples);
  for (int k = 0; k < samples; ++k) {
    double phi = 2 * kPi * k / samples;
    out.push_back(normalized(f * Vec3{std::cos(phi), std::sin(phi), 1.0}));
  }
  return out;
}

std::vector<Vec3> interior_rays(const Cone& c, int rings, int azimuths) {
  Mat3 f = cone_frame(c);
  std::vector<Vec3> out;
  out.push_back(normalized(f * Vec3{0, 0, 1}));
  for (int r = 1; r <= rings; ++r) {
    double s = double(r) / rings;
    for (int k = 0; k < azimuths; ++k) {
      double phi = 2 * kPi * k / azimuths;
      out.push_back(normalized(f * Vec3{s * std::cos(phi), s * std::sin(phi), 1.0}));
    }
  }
  return out;
}

double angular_slack(const Cone& c, const Vec3& v0) {
  Vec3 v = normalized(v0);
  if (auto* cc = std::get_if<CircularCone>(&c)) {
    double ang = std::acos(std::min(1.0, std::abs(dot(v, cc->axis))));
    return cc->aperture - ang;
  }
  const auto& ic = std::get<LinearImageCone>(c);
  double qv = quad(ic.inverse, v);
  bool inside = qv >= 0;
  auto [e1, e2] = perp_basis(v);
  double best = kPi / 2;
  const int dirs = 72;
  for (int k = 0; k < dirs; ++k) {
    double psi = kPi * k / dirs;  // u and -u both covered via the two roots
    Vec3 u = std::cos(psi) * e1 + std::sin(psi) * e2;
    // Q(v + t u) = qv + 2 t b + t^2 qu, t = tan(phi)
    double b = bilin(ic.inverse, v, u), qu = quad(ic.inverse, u);
    double roots[2];
    int nr = 0;
    if (std::abs(qu) < 1e-300) {
      if (b != 0) roots[nr++] = -qv / (2 * b);
    } else {
      double disc = b * b - qu * qv;
      if (disc >= 0) {
        double sq = std::sqrt(disc);
        roots[nr++] = (-b + sq) / qu;
        roots[nr++] = (-b - sq) / qu;
      }
    }
    for (int i = 0; i < nr; ++i) best = std::min(best, std::atan(std::abs(roots[i])));
  }
  return inside ? best : -best;
}

double containment_slack(const Cone& inner, const Cone& outer, int samples) {
  double worst = std::numeric_limits<double>::infinity();
  for (const Vec3& r : boundary_rays(inner, samples)) worst = std::min(worst, angular_slack(outer, r));
  return worst;
}

bool cone_strictly_contained(const Cone& inner, const Cone& outer, int samples, double margin) {
  validate(inner);
  validate(outer);
  if (samples < 16) throw Error(ErrorKind::invalid_parameters, "need at least 16 boundary samples");
  if (!(margin > 0)) throw Error(ErrorKind::invalid_parameters, "margin must be positive");
  // the axis has to sit inside too, otherwise a wide inner cone can wrap around outer's boundary
  if (angular_slack(outer, cone_axis(inner)) < margin) return false;
  return containment_slack(inner, outer, samples) >= margin;
}

}  // namespace phmp
