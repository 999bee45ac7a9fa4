#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <utility>

namespace phmp {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
inline Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
inline Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline Vec3 operator*(double s, Vec3 a) { return a *= s; }
inline Vec3 operator*(Vec3 a, double s) { return a *= s; }
inline Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 normalized(const Vec3& a);
// angle between two nonzero vectors, in [0, pi]
double angle_between(const Vec3& a, const Vec3& b);

struct Mat2 {
  std::array<double, 4> a{};  // row-major

  double& operator()(int r, int c) { return a[2 * r + c]; }
  double operator()(int r, int c) const { return a[2 * r + c]; }

  static Mat2 identity() { return {{1, 0, 0, 1}}; }
  static Mat2 diag(double p, double q) { return {{p, 0, 0, q}}; }
  static Mat2 rotation(double angle);

  double det() const { return a[0] * a[3] - a[1] * a[2]; }
  double trace() const { return a[0] + a[3]; }
};

Mat2 operator*(const Mat2& p, const Mat2& q);
Mat2 operator+(const Mat2& p, const Mat2& q);
Mat2 operator-(const Mat2& p, const Mat2& q);
Mat2 operator*(double s, const Mat2& p);
std::array<double, 2> operator*(const Mat2& m, const std::array<double, 2>& v);
Mat2 inverse(const Mat2& m);
// largest singular value
double operator_norm(const Mat2& m);
double max_abs_entry(const Mat2& m);

struct Eigen2 {
  std::complex<double> first, second;
  bool non_real = false;
};

// roots of l^2 - tr l + det; non_real iff discriminant < -1e-12
Eigen2 eigenvalues2(const Mat2& m);

struct Mat3 {
  std::array<double, 9> a{};

  double& operator()(int r, int c) { return a[3 * r + c]; }
  double operator()(int r, int c) const { return a[3 * r + c]; }

  static Mat3 identity() { return diag(1, 1, 1); }
  static Mat3 diag(double p, double q, double r) { return {{p, 0, 0, 0, q, 0, 0, 0, r}}; }
  static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2);
  // right-handed rotation about a unit axis
  static Mat3 rotation(const Vec3& axis, double angle);

  Vec3 column(int c) const { return {a[c], a[3 + c], a[6 + c]}; }
  Vec3 row(int r) const { return {a[3 * r], a[3 * r + 1], a[3 * r + 2]}; }
  double det() const;
  double frobenius() const;
  Mat3 transpose() const;
};

Mat3 operator*(const Mat3& p, const Mat3& q);
Vec3 operator*(const Mat3& m, const Vec3& v);
Mat3 operator+(const Mat3& p, const Mat3& q);
Mat3 operator-(const Mat3& p, const Mat3& q);
Mat3 operator*(double s, const Mat3& p);
double max_abs_entry(const Mat3& m);
Mat3 abs_entries(const Mat3& m);

// |det| <= 1e-12 |m|^3 counts as singular
bool is_singular(const Mat3& m);
// throws ErrorKind::invalid_parameters when singular
Mat3 inverse(const Mat3& m);

struct Plane {
  Vec3 normal{0, 0, 1};
};

Plane make_plane(const Vec3& normal);
// fixed orthonormal pair (u, v) with u x v = normal
std::pair<Vec3, Vec3> plane_basis(const Plane& p);

// (projection along transversal onto target) o l, restricted to source, written in the
// plane_basis of source and target
Mat2 restricted_matrix(const Mat3& l, const Plane& source, const Plane& target, const Vec3& transversal);
double restricted_determinant(const Mat3& l, const Plane& source, const Plane& target,
                              const Vec3& transversal);
// same, with caller supplied orthonormal bases (source_basis spans source, etc.)
Mat2 restricted_matrix(const Mat3& l, const std::pair<Vec3, Vec3>& source_basis,
                       const std::pair<Vec3, Vec3>& target_basis, const Vec3& transversal);

}  // namespace phmp
