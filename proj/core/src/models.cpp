#include "phmp/models.hpp"

#include <algorithm>
#include <cmath>

#include "phmp/cones.hpp"
#include "phmp/error.hpp"

namespace phmp {

namespace {

constexpr double kTwoPi = 2 * kPi;

bool in_box(const Box3& b, const Vec3& p, double tol = 1e-12) { return b.contains(p, tol); }

}  // namespace

// ---- solenoid

SolenoidModel::SolenoidModel(double lambda, double offset) : lambda_(lambda), c_(offset) {
  chart_.name = "solid-torus";
  chart_.domain = {{0, -1, -1}, {1, 1, 1}};
  chart_.periodic = {true, false, false};
}

std::optional<Vec3> SolenoidModel::try_forward(const Vec3& p) const {
  if (std::abs(p.y) > 1 + 1e-12 || std::abs(p.z) > 1 + 1e-12) return std::nullopt;
  double a = kTwoPi * p.x;
  return wrap({2 * p.x, lambda_ * p.y + c_ * std::cos(a), lambda_ * p.z + c_ * std::sin(a)});
}

std::optional<Vec3> SolenoidModel::try_inverse(const Vec3& q0) const {
  Vec3 q = wrap(q0);
  std::optional<Vec3> best;
  double best_r = 1e300;
  for (int sheet = 0; sheet < 2; ++sheet) {
    double th = 0.5 * q.x + 0.5 * sheet;
    double a = kTwoPi * th;
    Vec3 p{th, (q.y - c_ * std::cos(a)) / lambda_, (q.z - c_ * std::sin(a)) / lambda_};
    double r = std::hypot(p.y, p.z);
    if (r < best_r) {
      best_r = r;
      best = p;
    }
  }
  if (!best || std::abs(best->y) > 1 + 1e-9 || std::abs(best->z) > 1 + 1e-9) return std::nullopt;
  return best;
}

Mat3 SolenoidModel::jacobian(const Vec3& p) const {
  double a = kTwoPi * p.x;
  return {{2, 0, 0, -kTwoPi * c_ * std::sin(a), lambda_, 0, kTwoPi * c_ * std::cos(a), 0, lambda_}};
}

Mat3 SolenoidModel::lipschitz_matrix(const Box3&) const {
  double s = kTwoPi * c_;
  return {{2, 0, 0, s, lambda_, 0, s, 0, lambda_}};
}

std::vector<MarkedPoint> SolenoidModel::marked_points() const {
  MarkedPoint m;
  m.name = "fixed";
  m.position = {0, c_ / (1 - lambda_), 0};
  m.period = 1;
  m.stable_dim = 2;
  m.disc = FlatDisc{{0, 0, 0}, 0, 1.0};
  return {m};
}

Vec3 SolenoidModel::metric_scale() const { return {kTwoPi, 1, 1}; }

// ---- horseshoe

namespace {
constexpr double kB1 = 1.0 / 3.0, kB2 = 2.0 / 3.0;
}

HorseshoeModel::HorseshoeModel() {
  chart_.name = "cylinder-box";
  chart_.domain = {{-1, -1, -0.25}, {1, 1, 1.25}};
}

std::vector<Box3> HorseshoeModel::branch_domains() const {
  return {{{-1, -1, -0.25}, {1, 1, kB1}}, {{-1, -1, kB1}, {1, 1, kB2}}, {{-1, -1, kB2}, {1, 1, 1.25}}};
}

int HorseshoeModel::branch_of(const Vec3& p) const {
  if (p.z <= kB1) return 0;
  if (p.z < kB2) return 1;
  return 2;
}

std::optional<Vec3> HorseshoeModel::forward_branch(const Vec3& p, int b) const {
  if (!in_box(chart_.domain, p)) return std::nullopt;
  switch (b) {
    case 0: return Vec3{p.x / 4 - 0.5, p.y / 4, 3 * p.z};
    case 1: return Vec3{p.x / 4, p.y / 4, 3 * p.z - 3};  // lands below the chart
    case 2: return Vec3{p.x / 5 + 0.5, p.y / 2, 3 * p.z - 2};
  }
  return std::nullopt;
}

std::optional<Vec3> HorseshoeModel::try_forward(const Vec3& p) const { return forward_branch(p, branch_of(p)); }

std::optional<Vec3> HorseshoeModel::try_inverse(const Vec3& q) const {
  const double t = 1e-12;
  auto ok = [&](const Vec3& p, double zlo, double zhi) {
    return std::abs(p.x) <= 1 + t && std::abs(p.y) <= 1 + t && p.z >= zlo - t && p.z <= zhi + t;
  };
  Vec3 p0{4 * (q.x + 0.5), 4 * q.y, q.z / 3};
  if (ok(p0, -0.25, kB1)) return p0;
  Vec3 p2{5 * (q.x - 0.5), 2 * q.y, (q.z + 2) / 3};
  if (ok(p2, kB2, 1.25)) return p2;
  Vec3 p1{4 * q.x, 4 * q.y, (q.z + 3) / 3};
  if (ok(p1, kB1, kB2)) return p1;
  return std::nullopt;
}

Mat3 HorseshoeModel::jacobian(const Vec3& p) const {
  switch (branch_of(p)) {
    case 0: return Mat3::diag(0.25, 0.25, 3);
    case 1: return Mat3::diag(0.25, 0.25, 3);
    default: return Mat3::diag(0.2, 0.5, 3);
  }
}

Mat3 HorseshoeModel::lipschitz_matrix(const Box3& where) const {
  double ly = 0.25;
  if (where.hi.z >= kB2) ly = 0.5;
  return Mat3::diag(0.25, ly, 3);
}

std::vector<MarkedPoint> HorseshoeModel::marked_points() const {
  MarkedPoint p{"p", {-2.0 / 3.0, 0, 0}, 1, 2, FlatDisc{{0, 0, 0}, 2, 1.0}};
  MarkedPoint q{"q2", {5.0 / 8.0, 0, 1}, 1, 2, FlatDisc{{0, 0, 1}, 2, 1.0}};
  return {p, q};
}

bool HorseshoeModel::smooth_near(const Vec3& p, double r) const {
  return std::abs(p.z - kB1) > r && std::abs(p.z - kB2) > r;
}

// ---- contraction

ContractionModel::ContractionModel() { chart_ = {"cube", {{-1, -1, -1}, {1, 1, 1}}, {false, false, false}}; }

std::optional<Vec3> ContractionModel::try_forward(const Vec3& p) const {
  if (!in_box(chart_.domain, p)) return std::nullopt;
  return 0.5 * p;
}
std::optional<Vec3> ContractionModel::try_inverse(const Vec3& q) const {
  Vec3 p = 2.0 * q;
  if (!in_box(chart_.domain, p)) return std::nullopt;
  return p;
}
Mat3 ContractionModel::jacobian(const Vec3&) const { return Mat3::diag(0.5, 0.5, 0.5); }
Mat3 ContractionModel::lipschitz_matrix(const Box3&) const { return Mat3::diag(0.5, 0.5, 0.5); }
std::vector<MarkedPoint> ContractionModel::marked_points() const {
  return {MarkedPoint{"origin", {0, 0, 0}, 1, 3, std::nullopt}};
}

// ---- two contractions

TwoContractionsModel::TwoContractionsModel() {
  chart_ = {"double-cube", {{-2, -1, -1}, {2, 1, 1}}, {false, false, false}};
}
std::vector<Box3> TwoContractionsModel::branch_domains() const {
  return {{{-2, -1, -1}, {0, 1, 1}}, {{0, -1, -1}, {2, 1, 1}}};
}
std::optional<Vec3> TwoContractionsModel::forward_branch(const Vec3& p, int b) const {
  if (!in_box(chart_.domain, p)) return std::nullopt;
  double c = b == 0 ? -1.0 : 1.0;
  return Vec3{c + 0.5 * (p.x - c), 0.5 * p.y, 0.5 * p.z};
}
std::optional<Vec3> TwoContractionsModel::try_forward(const Vec3& p) const {
  return forward_branch(p, p.x < 0 ? 0 : 1);
}
std::optional<Vec3> TwoContractionsModel::try_inverse(const Vec3& q) const {
  double c = q.x < 0 ? -1.0 : 1.0;
  Vec3 p{c + 2 * (q.x - c), 2 * q.y, 2 * q.z};
  if (!in_box(chart_.domain, p) || (c < 0 && p.x > 0) || (c > 0 && p.x < 0)) return std::nullopt;
  return p;
}
Mat3 TwoContractionsModel::jacobian(const Vec3&) const { return Mat3::diag(0.5, 0.5, 0.5); }
Mat3 TwoContractionsModel::lipschitz_matrix(const Box3&) const { return Mat3::diag(0.5, 0.5, 0.5); }
bool TwoContractionsModel::smooth_near(const Vec3& p, double r) const { return std::abs(p.x) > r; }

// ---- north-south

NorthSouthModel::NorthSouthModel() { chart_ = {"segment", {{0, -1, -1}, {1, 1, 1}}, {false, false, false}}; }
std::optional<Vec3> NorthSouthModel::try_forward(const Vec3& p) const {
  if (!in_box(chart_.domain, p)) return std::nullopt;
  return Vec3{4 * p.x / (1 + 3 * p.x), 0.5 * p.y, 0.5 * p.z};
}
std::optional<Vec3> NorthSouthModel::try_inverse(const Vec3& q) const {
  if (q.x > 4.0 / 3.0 - 1e-9) return std::nullopt;
  Vec3 p{q.x / (4 - 3 * q.x), 2 * q.y, 2 * q.z};
  if (!in_box(chart_.domain, p)) return std::nullopt;
  return p;
}
Mat3 NorthSouthModel::jacobian(const Vec3& p) const {
  double d = 1 + 3 * p.x;
  return Mat3::diag(4 / (d * d), 0.5, 0.5);
}
Mat3 NorthSouthModel::lipschitz_matrix(const Box3& w) const {
  // f' is decreasing on [0, 1]
  double lo = std::clamp(w.lo.x, 0.0, 1.0);
  double d = 1 + 3 * lo;
  return Mat3::diag(4 / (d * d), 0.5, 0.5);
}
std::vector<MarkedPoint> NorthSouthModel::marked_points() const {
  return {MarkedPoint{"source", {0, 0, 0}, 1, 2, std::nullopt}, MarkedPoint{"sink", {1, 0, 0}, 1, 3, std::nullopt}};
}

// ---- identity

IdentityModel::IdentityModel() { chart_ = {"cube", {{-1, -1, -1}, {1, 1, 1}}, {false, false, false}}; }
std::optional<Vec3> IdentityModel::try_forward(const Vec3& p) const {
  if (!in_box(chart_.domain, p)) return std::nullopt;
  return p;
}
std::optional<Vec3> IdentityModel::try_inverse(const Vec3& p) const { return try_forward(p); }
Mat3 IdentityModel::jacobian(const Vec3&) const { return Mat3::identity(); }
Mat3 IdentityModel::lipschitz_matrix(const Box3&) const { return Mat3::identity(); }

// ---- registry

std::vector<std::string> model_names() {
  return {"solenoid", "horseshoe3d", "contraction", "two-contractions", "north-south", "identity"};
}

MapPtr make_model(const std::string& name) {
  if (name == "solenoid") return std::make_shared<SolenoidModel>();
  if (name == "horseshoe3d" || name == "horseshoe") return std::make_shared<HorseshoeModel>();
  if (name == "contraction") return std::make_shared<ContractionModel>();
  if (name == "two-contractions") return std::make_shared<TwoContractionsModel>();
  if (name == "north-south") return std::make_shared<NorthSouthModel>();
  if (name == "identity") return std::make_shared<IdentityModel>();
  throw Error(ErrorKind::usage, "unknown model '" + name + "'");
}

}  // namespace phmp
