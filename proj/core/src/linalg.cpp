#include "phmp/linalg.hpp"

#include <algorithm>

#include "phmp/error.hpp"

namespace phmp {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_cone: return "invalid-cone";
    case ErrorKind::projection_degenerate: return "projection-degenerate";
    case ErrorKind::incompatible_cocycles: return "incompatible-cocycles";
    case ErrorKind::invalid_parameters: return "invalid-parameters";
    case ErrorKind::unattainable_parameters: return "unattainable-parameters";
    case ErrorKind::domain: return "domain";
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::invalid_marker: return "invalid-marker";
    case ErrorKind::invalid_curve: return "invalid-curve";
    case ErrorKind::usage: return "usage";
    case ErrorKind::io: return "io";
  }
  return "error";
}

Vec3 normalized(const Vec3& a) {
  double n = norm(a);
  if (n == 0.0) throw Error(ErrorKind::invalid_parameters, "cannot normalize zero vector");
  return a / n;
}

double angle_between(const Vec3& a, const Vec3& b) {
  // atan2 form keeps precision near 0 and pi
  return std::atan2(norm(cross(a, b)), dot(a, b));
}

Mat2 Mat2::rotation(double t) {
  double c = std::cos(t), s = std::sin(t);
  return {{c, -s, s, c}};
}

Mat2 operator*(const Mat2& p, const Mat2& q) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = p(i, 0) * q(0, j) + p(i, 1) * q(1, j);
  return r;
}
Mat2 operator+(const Mat2& p, const Mat2& q) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.a[i] = p.a[i] + q.a[i];
  return r;
}
Mat2 operator-(const Mat2& p, const Mat2& q) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.a[i] = p.a[i] - q.a[i];
  return r;
}
Mat2 operator*(double s, const Mat2& p) {
  Mat2 r;
  for (int i = 0; i < 4; ++i) r.a[i] = s * p.a[i];
  return r;
}
std::array<double, 2> operator*(const Mat2& m, const std::array<double, 2>& v) {
  return {m(0, 0) * v[0] + m(0, 1) * v[1], m(1, 0) * v[0] + m(1, 1) * v[1]};
}

Mat2 inverse(const Mat2& m) {
  double d = m.det();
  if (std::abs(d) <= 1e-300) throw Error(ErrorKind::invalid_parameters, "singular 2x2 matrix");
  return {{m(1, 1) / d, -m(0, 1) / d, -m(1, 0) / d, m(0, 0) / d}};
}

double operator_norm(const Mat2& m) {
  // sigma_max^2 = (F^2 + sqrt(F^4 - 4 det^2)) / 2
  double f2 = 0;
  for (double v : m.a) f2 += v * v;
  double d = m.det();
  double disc = std::max(0.0, f2 * f2 - 4 * d * d);
  return std::sqrt(std::max(0.0, (f2 + std::sqrt(disc)) / 2));
}

double max_abs_entry(const Mat2& m) {
  double r = 0;
  for (double v : m.a) r = std::max(r, std::abs(v));
  return r;
}

Eigen2 eigenvalues2(const Mat2& m) {
  double tr = m.trace(), d = m.det();
  double disc = tr * tr - 4 * d;
  Eigen2 e;
  if (disc < -1e-12) {
    double im = std::sqrt(-disc) / 2;
    e.first = {tr / 2, im};
    e.second = {tr / 2, -im};
    e.non_real = true;
    return e;
  }
  double sq = std::sqrt(std::max(0.0, disc));
  // avoid cancellation in the smaller root
  double big = tr >= 0 ? (tr + sq) / 2 : (tr - sq) / 2;
  double small = big != 0.0 ? d / big : 0.0;
  if (std::abs(big) < std::abs(small)) std::swap(big, small);
  e.first = std::min(big, small);
  e.second = std::max(big, small);
  return e;
}

Mat3 Mat3::from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
  return {{c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z}};
}

Mat3 Mat3::rotation(const Vec3& axis, double t) {
  Vec3 k = normalized(axis);
  double c = std::cos(t), s = std::sin(t), v = 1 - c;
  return {{c + k.x * k.x * v, k.x * k.y * v - k.z * s, k.x * k.z * v + k.y * s,
           k.y * k.x * v + k.z * s, c + k.y * k.y * v, k.y * k.z * v - k.x * s,
           k.z * k.x * v - k.y * s, k.z * k.y * v + k.x * s, c + k.z * k.z * v}};
}

double Mat3::det() const {
  const Mat3& m = *this;
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

double Mat3::frobenius() const {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

Mat3 Mat3::transpose() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
  return r;
}

Mat3 operator*(const Mat3& p, const Mat3& q) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = p(i, 0) * q(0, j) + p(i, 1) * q(1, j) + p(i, 2) * q(2, j);
  return r;
}
Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z, m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
          m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}
Mat3 operator+(const Mat3& p, const Mat3& q) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = p.a[i] + q.a[i];
  return r;
}
Mat3 operator-(const Mat3& p, const Mat3& q) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = p.a[i] - q.a[i];
  return r;
}
Mat3 operator*(double s, const Mat3& p) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = s * p.a[i];
  return r;
}
double max_abs_entry(const Mat3& m) {
  double r = 0;
  for (double v : m.a) r = std::max(r, std::abs(v));
  return r;
}
Mat3 abs_entries(const Mat3& m) {
  Mat3 r;
  for (int i = 0; i < 9; ++i) r.a[i] = std::abs(m.a[i]);
  return r;
}

bool is_singular(const Mat3& m) {
  double n = m.frobenius();
  return std::abs(m.det()) <= 1e-12 * n * n * n;
}

Mat3 inverse(const Mat3& m) {
  if (is_singular(m)) throw Error(ErrorKind::invalid_parameters, "singular 3x3 matrix");
  double d = m.det();
  Mat3 r;
  r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / d;
  r(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / d;
  r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / d;
  r(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / d;
  r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / d;
  r(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / d;
  r(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / d;
  r(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / d;
  r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / d;
  return r;
}

Plane make_plane(const Vec3& normal) {
  double n = norm(normal);
  if (!(n > 0)) throw Error(ErrorKind::invalid_parameters, "plane normal is zero");
  return {normal / n};
}

std::pair<Vec3, Vec3> plane_basis(const Plane& p) {
  const Vec3& n = p.normal;
  // seed with the coordinate axis least aligned with n
  Vec3 seed{1, 0, 0};
  double ax = std::abs(n.x), ay = std::abs(n.y), az = std::abs(n.z);
  if (ay < ax && ay <= az) seed = {0, 1, 0};
  else if (az < ax && az < ay) seed = {0, 0, 1};
  Vec3 u = normalized(seed - dot(seed, n) * n);
  Vec3 v = cross(n, u);
  return {u, v};
}

Mat2 restricted_matrix(const Mat3& l, const std::pair<Vec3, Vec3>& sb,
                       const std::pair<Vec3, Vec3>& tb, const Vec3& transversal) {
  Vec3 nt = normalized(cross(tb.first, tb.second));
  Vec3 tau = normalized(transversal);
  // angle between the transversal and the target plane
  double s = std::abs(dot(tau, nt));
  if (std::asin(std::min(1.0, s)) <= 1e-9)
    throw Error(ErrorKind::projection_degenerate, "transversal lies in the target plane");
  auto project = [&](const Vec3& w) { return w - (dot(w, nt) / dot(tau, nt)) * tau; };
  Vec3 a = project(l * sb.first);
  Vec3 b = project(l * sb.second);
  return {{dot(a, tb.first), dot(b, tb.first), dot(a, tb.second), dot(b, tb.second)}};
}

Mat2 restricted_matrix(const Mat3& l, const Plane& source, const Plane& target, const Vec3& transversal) {
  return restricted_matrix(l, plane_basis(source), plane_basis(target), transversal);
}

double restricted_determinant(const Mat3& l, const Plane& source, const Plane& target,
                              const Vec3& transversal) {
  return restricted_matrix(l, source, target, transversal).det();
}

}  // namespace phmp
