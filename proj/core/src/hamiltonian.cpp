#include <cmath>

#include "phmp/surgery.hpp"

namespace phmp {

namespace {

struct Potential {
  double phi;
  double gx, gy;          // gradient of phi
  double hxx, hxy, hyy;   // hessian of phi
};

Potential potential(const ModificationFamily& f, double x, double y) {
  if (f.kind == ModificationFamily::Kind::rotation) return {0.5 * (x * x + y * y), x, y, 1, 0, 1};
  return {-x * y, -y, -x, 0, -1, 0};
}

// Xi = phi * rho(r): gradient and hessian
void xi_derivatives(const ModificationFamily& f, double x, double y, double g[2], double h[3]) {
  Potential p = potential(f, x, y);
  double r = std::hypot(x, y);
  double rho = bump_rho(r);
  if (r <= 0.5 || r >= 1) {
    // rho is locally constant
    g[0] = rho * p.gx;
    g[1] = rho * p.gy;
    h[0] = rho * p.hxx;
    h[1] = rho * p.hxy;
    h[2] = rho * p.hyy;
    return;
  }
  double r1 = bump_rho_prime(r), r2 = bump_rho_second(r);
  double ux = x / r, uy = y / r;
  double rgx = r1 * ux, rgy = r1 * uy;
  // hessian of rho: rho'' u u^T + rho'/r (I - u u^T)
  double k = r1 / r;
  double rxx = r2 * ux * ux + k * (1 - ux * ux);
  double rxy = r2 * ux * uy - k * ux * uy;
  double ryy = r2 * uy * uy + k * (1 - uy * uy);
  g[0] = rho * p.gx + p.phi * rgx;
  g[1] = rho * p.gy + p.phi * rgy;
  h[0] = rho * p.hxx + 2 * p.gx * rgx + p.phi * rxx;
  h[1] = rho * p.hxy + p.gx * rgy + p.gy * rgx + p.phi * rxy;
  h[2] = rho * p.hyy + 2 * p.gy * rgy + p.phi * ryy;
}

}  // namespace

std::string ModificationFamily::label() const {
  if (kind == Kind::rotation) return "rotation";
  return "shear(" + std::to_string(beta) + ")";
}

double ModificationFamily::total_time() const {
  return kind == Kind::rotation ? kPi / 2 : std::log(beta);
}

std::array<double, 2> ModificationFamily::field(double x, double y) const {
  double g[2], h[3];
  xi_derivatives(*this, x, y, g, h);
  return {g[1], -g[0]};
}

Mat2 ModificationFamily::field_jacobian(double x, double y) const {
  double g[2], h[3];
  xi_derivatives(*this, x, y, g, h);
  return {{h[1], h[2], -h[0], -h[1]}};
}

namespace {

struct State {
  double x, y;
  Mat2 j;
};

State rhs(const ModificationFamily& f, const State& s, bool with_jac) {
  State d;
  auto v = f.field(s.x, s.y);
  d.x = v[0];
  d.y = v[1];
  if (with_jac) d.j = f.field_jacobian(s.x, s.y) * s.j;
  return d;
}

State axpy(const State& s, double a, const State& d, bool with_jac) {
  State r{s.x + a * d.x, s.y + a * d.y, s.j};
  if (with_jac) r.j = s.j + a * d.j;
  return r;
}

State integrate(const ModificationFamily& f, double t, std::array<double, 2> p, bool with_jac, double sign) {
  State s{p[0], p[1], Mat2::identity()};
  if (t == 0 || std::hypot(p[0], p[1]) >= 1) return s;  // field vanishes outside the unit disc
  double T = f.total_time();
  int n = std::max(1, int(std::ceil(std::abs(T) / f.step)));
  double dt = sign * T * t / n;
  for (int i = 0; i < n; ++i) {
    State k1 = rhs(f, s, with_jac);
    State k2 = rhs(f, axpy(s, dt / 2, k1, with_jac), with_jac);
    State k3 = rhs(f, axpy(s, dt / 2, k2, with_jac), with_jac);
    State k4 = rhs(f, axpy(s, dt, k3, with_jac), with_jac);
    s.x += dt / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    s.y += dt / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
    if (with_jac) s.j = s.j + (dt / 6) * (k1.j + 2.0 * k2.j + 2.0 * k3.j + k4.j);
  }
  return s;
}

}  // namespace

FlowResult hamiltonian_flow(const ModificationFamily& fam, double t, std::array<double, 2> p) {
  State s = integrate(fam, t, p, true, 1.0);
  return {{s.x, s.y}, s.j};
}

std::array<double, 2> hamiltonian_flow_inverse(const ModificationFamily& fam, double t, std::array<double, 2> p) {
  State s = integrate(fam, t, p, false, -1.0);
  return {s.x, s.y};
}

Mat2 hamiltonian_jacobian2(const ModificationFamily& fam, double t, std::array<double, 2> p) {
  return hamiltonian_flow(fam, t, p).jacobian;
}

}  // namespace phmp
