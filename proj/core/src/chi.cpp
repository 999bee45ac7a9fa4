#include <algorithm>
#include <cmath>

#include "phmp/error.hpp"
#include "phmp/surgery.hpp"

namespace phmp {

namespace {
// quintic smoothstep and derivatives on [0, 1]
double s0(double u) { return u * u * u * (10 + u * (-15 + 6 * u)); }
double s1(double u) { return 30 * u * u * (1 - u) * (1 - u); }
double s2(double u) { return 60 * u * (1 - u) * (1 - 2 * u); }
}  // namespace

double bump_rho(double t) {
  double a = std::abs(t);
  if (a <= 0.5) return 1;
  if (a >= 1) return 0;
  return 1 - s0(2 * a - 1);
}

double bump_rho_prime(double t) {
  double a = std::abs(t);
  if (a <= 0.5 || a >= 1) return 0;
  double d = -2 * s1(2 * a - 1);
  return t < 0 ? -d : d;
}

double bump_rho_second(double t) {
  double a = std::abs(t);
  if (a <= 0.5 || a >= 1) return 0;
  return -4 * s2(2 * a - 1);
}

Chi::Chi(double K, double delta, double alpha) : K_(K), delta_(delta), alpha_(alpha) {
  if (!(K > 1) || !(delta > 0 && delta < 1) || !(alpha > 0 && alpha < 1) || !(K * alpha < 1))
    throw Error(ErrorKind::invalid_parameters, "chi needs K > 1, 0 < delta < 1, 0 < alpha, K alpha < 1");
  // blend width kept below alpha/K so the deviation bound survives large K
  w_ = std::min(alpha / 5, alpha / K);
  b_ = 1 - alpha / 10;
  w2_ = std::min(0.2, (b_ - alpha - w_) / 2);
  m_ = (b_ - w2_ / 2 - K * (alpha + w_ / 2)) / (b_ - alpha - w_ / 2 - w2_ / 2);
  z1_ = alpha;
  z2_ = alpha + w_;
  z3_ = b_ - w2_;
  z4_ = b_;
  v1_ = K * alpha;
  v2_ = v1_ + 0.5 * (K + m_) * w_;
  v3_ = v2_ + m_ * (z3_ - z2_);
}

double Chi::positive(double z) const {
  if (z <= z1_) return K_ * z;
  if (z <= z2_) {
    double s = z - z1_;
    return v1_ + K_ * s + 0.5 * (m_ - K_) / w_ * s * s;
  }
  if (z <= z3_) return v2_ + m_ * (z - z2_);
  if (z <= z4_) {
    double s = z - z3_;
    return v3_ + m_ * s + 0.5 * (1 - m_) / w2_ * s * s;
  }
  return z;
}

double Chi::positive_derivative(double z) const {
  if (z <= z1_) return K_;
  if (z <= z2_) return K_ + (m_ - K_) * (z - z1_) / w_;
  if (z <= z3_) return m_;
  if (z <= z4_) return m_ + (1 - m_) * (z - z3_) / w2_;
  return 1;
}

double Chi::operator()(double z) const { return z < 0 ? -positive(-z) : positive(z); }
double Chi::derivative(double z) const { return positive_derivative(std::abs(z)); }

std::vector<double> Chi::kinks() const { return {-z4_, -z3_, -z2_, -z1_, z1_, z2_, z3_, z4_}; }

ChiCheck Chi::verify(int grid) const {
  ChiCheck c;
  const double tol = 1e-12;
  c.linear_core = c.derivative_bounds = c.identity_ends = c.deviation = true;
  c.min_derivative = 1e300;
  c.max_derivative = -1e300;
  auto visit = [&](double z) {
    double v = (*this)(z), d = derivative(z);
    c.min_derivative = std::min(c.min_derivative, d);
    c.max_derivative = std::max(c.max_derivative, d);
    if (d < 1 - delta_ - tol || d > K_ + tol) c.derivative_bounds = false;
    double dev = std::abs(v - z);
    c.max_deviation = std::max(c.max_deviation, dev);
    if (dev > alpha_ * K_ + tol) c.deviation = false;
    if (std::abs(z) <= alpha_ && std::abs(v - K_ * z) > tol) c.linear_core = false;
    if (std::abs(z) >= b_ && std::abs(v - z) > tol) c.identity_ends = false;
  };
  for (int i = 0; i <= grid; ++i) visit(-1 + 2.0 * i / grid);
  // the core is tiny for small alpha; give it its own samples
  for (int i = 0; i <= 200; ++i) visit(-alpha_ + 2 * alpha_ * i / 200);
  for (double k : kinks()) visit(k);
  if (std::abs((*this)(1.0) - 1) > tol || std::abs(derivative(1.0) - 1) > tol) c.identity_ends = false;
  return c;
}

double alpha_max(double K, double delta) {
  double a = 0.5;
  for (int i = 0; i <= 60; ++i, a *= 0.5) {
    if (K * a >= 1) continue;
    if (Chi(K, delta, a).verify().ok()) return a;
  }
  throw Error(ErrorKind::unattainable_parameters, "no admissible alpha after 60 halvings");
}

Chi make_chi(double K, double delta, double alpha) {
  Chi c(K, delta, alpha);
  ChiCheck chk = c.verify();
  if (!chk.ok())
    throw Error(ErrorKind::unattainable_parameters,
                "chi verification failed; alpha above alpha_max = " + std::to_string(alpha_max(K, delta)));
  return c;
}

}  // namespace phmp
