#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "phmp/error.hpp"
#include "phmp/surgery.hpp"

namespace phmp {

SurgeredMap::SurgeredMap(MapPtr base, SurgerySpec spec, std::shared_ptr<const GammaHat> kernel,
                         GammaHatCertificate cert, Vec3 centre)
    : base_(std::move(base)), spec_(std::move(spec)), kernel_(std::move(kernel)), cert_(cert), centre_(centre) {
  // the support cylinder r <= eps, |z| <= eps sits inside the ball of radius scale
  eps_ = spec_.scale / std::sqrt(2.0);
  kernel_lip_ = cert_.max_abs_jacobian;
  for (int i = 0; i < 3; ++i) kernel_lip_(i, i) = std::max(kernel_lip_(i, i), 1.0);
  kernel_lip_ = 1.25 * kernel_lip_;
}

std::string SurgeredMap::name() const { return base_->name() + "+" + spec_.family.label() + "@" + spec_.target; }

bool SurgeredMap::in_support(const Vec3& y, double slack) const {
  Vec3 d = base_->difference(y, centre_) / eps_;
  return std::abs(d.x) < 1 + slack && std::abs(d.y) < 1 + slack && std::abs(d.z) < 1 + slack;
}

Vec3 SurgeredMap::h(const Vec3& y) const {
  if (!in_support(y)) return y;
  Vec3 d = base_->difference(y, centre_);
  return base_->wrap(centre_ + eps_ * kernel_->apply(d / eps_));
}

Vec3 SurgeredMap::h_inverse(const Vec3& y) const {
  if (!in_support(y)) return y;
  Vec3 d = base_->difference(y, centre_);
  return base_->wrap(centre_ + eps_ * kernel_->apply_inverse(d / eps_));
}

Mat3 SurgeredMap::h_jacobian(const Vec3& y) const {
  if (!in_support(y)) return Mat3::identity();
  return kernel_->jacobian(base_->difference(y, centre_) / eps_);
}

std::optional<Vec3> SurgeredMap::forward_branch(const Vec3& p, int b) const {
  auto y = base_->forward_branch(p, b);
  if (!y) return y;
  return h(*y);
}

std::optional<Vec3> SurgeredMap::try_forward(const Vec3& p) const {
  auto y = base_->try_forward(p);
  if (!y) return y;
  return h(*y);
}

std::optional<Vec3> SurgeredMap::try_inverse(const Vec3& q) const { return base_->try_inverse(h_inverse(q)); }

Mat3 SurgeredMap::jacobian(const Vec3& p) const {
  Vec3 y = base_->forward(p);
  return h_jacobian(y) * base_->jacobian(p);
}

Mat3 SurgeredMap::lipschitz_matrix(const Box3& where) const {
  Mat3 lf = base_->lipschitz_matrix(where);
  // the local test needs one smooth branch on the whole box
  bool one_branch = false;
  for (const Box3& d : base_->branch_domains())
    one_branch = one_branch || (d.contains(where.lo, 1e-12) && d.contains(where.hi, 1e-12));
  auto fc = base_->try_forward(where.center());
  if (fc && one_branch) {
    Vec3 half = 0.5 * where.extent();
    Vec3 pad = lf * half;
    Box3 img{*fc - pad, *fc + pad};
    for (int c = 0; c < 8; ++c) {
      Vec3 q{c & 1 ? where.hi.x : where.lo.x, c & 2 ? where.hi.y : where.lo.y, c & 4 ? where.hi.z : where.lo.z};
      auto fq = base_->try_forward(q);
      if (!fq || !img.contains(*fq, 1e-12)) return kernel_lip_ * lf;
    }
    Vec3 e{eps_, eps_, eps_};
    Box3 sup{centre_ - e, centre_ + e};
    bool hit = false;
    // periodic shifts matter for the solenoid only
    for (int s = -1; s <= 1 && !hit; ++s) {
      Box3 shifted = sup;
      for (int i = 0; i < 3; ++i)
        if (chart().periodic[i]) {
          double len = chart().domain.hi[i] - chart().domain.lo[i];
          shifted.lo[i] += s * len;
          shifted.hi[i] += s * len;
        }
      hit = img.intersects(shifted);
    }
    if (!hit) return lf;
  }
  return kernel_lip_ * lf;
}

std::vector<MarkedPoint> SurgeredMap::marked_points() const {
  auto pts = base_->marked_points();
  for (auto& m : pts) {
    if (m.name != spec_.target || !m.disc) continue;
    Mat3 j = jacobian(m.position);
    int k = m.disc->normal_axis;
    int a = (k + 1) % 3, b = (k + 2) % 3;
    if (a > b) std::swap(a, b);
    Mat2 blk{{j(a, a), j(a, b), j(b, a), j(b, b)}};
    Eigen2 e = eigenvalues2(blk);
    int s = 0;
    if (std::abs(e.first) < 1) ++s;
    if (std::abs(e.second) < 1) ++s;
    if (std::abs(j(k, k)) < 1) ++s;
    m.stable_dim = s;
  }
  return pts;
}

std::vector<Vec3> SurgeredMap::sample_hints() const {
  auto out = base_->sample_hints();
  // preimages of a grid inside the support, denser in the core cylinder
  double s = kernel_->alpha() / 2;
  std::vector<Vec3> local;
  const int n = 7;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 q{-1 + 2.0 * (i + 0.5) / n, -1 + 2.0 * (j + 0.5) / n, -1 + 2.0 * (k + 0.5) / n};
        local.push_back(s * q);
        local.push_back(0.9 * q);
        local.push_back({0.9 * q.x, 0.9 * q.y, 3 * s * q.z});
      }
  for (const Vec3& l : local) {
    Vec3 y = base_->wrap(centre_ + eps_ * l);
    if (auto p = base_->try_inverse(y)) out.push_back(*p);
  }
  return out;
}

bool SurgeredMap::smooth_near(const Vec3& p, double r) const {
  if (!base_->smooth_near(p, r)) return false;
  auto y = base_->try_forward(p);
  if (!y) return true;
  double lr = base_->lipschitz_bound() * r;
  if (!in_support(*y, lr / eps_)) return true;
  Vec3 d = base_->difference(*y, centre_) / eps_;
  Vec3 c{std::clamp(d.x, -1.0, 1.0), std::clamp(d.y, -1.0, 1.0), std::clamp(d.z, -1.0, 1.0)};
  return kernel_->smooth_near(c, lr / eps_);
}

std::shared_ptr<const SurgeredMap> apply_surgery(const MapPtr& f, const SurgerySpec& spec) {
  if (!(spec.scale > 0)) throw Error(ErrorKind::invalid_spec, "surgery scale must be positive");
  std::optional<MarkedPoint> target;
  for (auto& m : f->marked_points())
    if (m.name == spec.target) target = m;
  if (!target) throw Error(ErrorKind::invalid_spec, "unknown surgery target '" + spec.target + "'");
  Vec3 c = target->position;
  for (auto& m : f->marked_points()) {
    if (m.name == spec.target) continue;
    if (norm(f->difference(m.position, c)) < 3 * spec.scale)
      throw Error(ErrorKind::invalid_spec, "support of radius " + std::to_string(spec.scale) +
                                               " comes within 2 radii of marked point " + m.name);
  }
  const Box3& dom = f->chart().domain;
  for (int i = 0; i < 3; ++i)
    if (!f->chart().periodic[i] && (c[i] - spec.scale < dom.lo[i] || c[i] + spec.scale > dom.hi[i]))
      throw Error(ErrorKind::invalid_spec, "support leaves the chart domain");

  std::shared_ptr<const GammaHat> kernel;
  GammaHatCertificate cert;
  Cone inner = circular_cone({0, 0, 1}, spec.inner_aperture);
  Cone outer = circular_cone({0, 0, 1}, spec.outer_aperture);
  if (spec.K && spec.delta && spec.alpha) {
    kernel = std::make_shared<GammaHat>(spec.family, make_chi(*spec.K, *spec.delta, *spec.alpha));
    cert = certify_gamma_hat(*kernel, inner, outer, spec.eta);
  } else {
    auto tuned = tune_gamma_hat(inner, outer, spec.eta, spec.family);
    kernel = tuned.kernel;
    cert = tuned.certificate;
  }
  return std::make_shared<SurgeredMap>(f, spec, kernel, cert, c);
}

void to_json(nlohmann::json& j, const SurgerySpec& s) {
  j = {{"target", s.target},
       {"scale", s.scale},
       {"eta", s.eta},
       {"inner_aperture_deg", s.inner_aperture * 180 / kPi},
       {"outer_aperture_deg", s.outer_aperture * 180 / kPi},
       {"step", s.family.step}};
  if (s.family.kind == ModificationFamily::Kind::rotation) j["family"] = "rotation";
  else j["family"] = {{"shear", s.family.beta}};
  if (s.K) j["K"] = *s.K;
  if (s.delta) j["delta"] = *s.delta;
  if (s.alpha) j["alpha"] = *s.alpha;
}

SurgerySpec surgery_spec_from_json(const nlohmann::json& j) {
  try {
    SurgerySpec s;
    s.target = j.at("target").get<std::string>();
    s.scale = j.at("scale").get<double>();
    double step = j.value("step", 1e-3);
    const auto& fam = j.at("family");
    if (fam.is_string() && fam.get<std::string>() == "rotation") s.family = ModificationFamily::rotation(step);
    else if (fam.is_object() && fam.contains("shear")) s.family = ModificationFamily::shear(fam.at("shear").get<double>(), step);
    else throw Error(ErrorKind::invalid_spec, "family must be \"rotation\" or {\"shear\": beta}");
    if (j.contains("K")) s.K = j.at("K").get<double>();
    if (j.contains("delta")) s.delta = j.at("delta").get<double>();
    if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
    s.eta = j.value("eta", 0.1);
    s.inner_aperture = deg(j.value("inner_aperture_deg", 10.0));
    s.outer_aperture = deg(j.value("outer_aperture_deg", 30.0));
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_spec, std::string("bad surgery spec: ") + e.what());
  }
}

}  // namespace phmp
