#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phmp/charted_map.hpp"
#include "phmp/cones.hpp"

namespace phmp {

// ---- bump

double bump_rho(double t);
double bump_rho_prime(double t);
double bump_rho_second(double t);
constexpr double kBumpSlopeMax = 15.0 / 4.0;

// ---- chi

struct ChiCheck {
  bool linear_core = false;       // chi = K z on [-alpha, alpha]
  bool derivative_bounds = false; // 1 - delta <= chi' <= K
  bool identity_ends = false;     // chi = z near +-1
  bool deviation = false;         // |chi - z| <= alpha K
  double max_deviation = 0;
  double min_derivative = 0, max_derivative = 0;
  bool ok() const { return linear_core && derivative_bounds && identity_ends && deviation; }
};

// odd, C1, piecewise quadratic; slope K on the core, m in the middle, 1 near the ends
class Chi {
 public:
  Chi(double K, double delta, double alpha);

  double operator()(double z) const;
  double derivative(double z) const;
  // points where chi is not C2
  std::vector<double> kinks() const;
  ChiCheck verify(int grid = 10000) const;

  double K() const { return K_; }
  double delta() const { return delta_; }
  double alpha() const { return alpha_; }
  double middle_slope() const { return m_; }

 private:
  double positive(double z) const;
  double positive_derivative(double z) const;

  double K_, delta_, alpha_;
  double w_, b_, w2_, m_;
  // knots of the derivative profile on [0, 1]
  double z1_, z2_, z3_, z4_;
  double v1_, v2_, v3_;
};

// largest alpha in {1/2, 1/4, ...} that passes verification
double alpha_max(double K, double delta);
Chi make_chi(double K, double delta, double alpha);

// ---- Hamiltonian modification families

struct ModificationFamily {
  enum class Kind { rotation, shear } kind = Kind::rotation;
  double beta = 2;    // shear strength
  double step = 1e-3; // integration step

  static ModificationFamily rotation(double h = 1e-3) { return {Kind::rotation, 2, h}; }
  static ModificationFamily shear(double beta, double h = 1e-3) { return {Kind::shear, beta, h}; }

  std::string label() const;
  double total_time() const;
  // Hamiltonian vector field (dXi/dy, -dXi/dx) and its derivative
  std::array<double, 2> field(double x, double y) const;
  Mat2 field_jacobian(double x, double y) const;
};

struct FlowResult {
  std::array<double, 2> point;
  Mat2 jacobian;
};

// Gamma_t: time total_time()*t map; fixed step count so the result is smooth in t
FlowResult hamiltonian_flow(const ModificationFamily& fam, double t, std::array<double, 2> p);
std::array<double, 2> hamiltonian_flow_inverse(const ModificationFamily& fam, double t, std::array<double, 2> p);
Mat2 hamiltonian_jacobian2(const ModificationFamily& fam, double t, std::array<double, 2> p);

// ---- assembled kernel

class GammaHat {
 public:
  GammaHat(ModificationFamily fam, Chi chi);

  // 1 = core cylinder (r, |z| <= alpha/2), 2 = r <= alpha/2 and |z| > alpha/2, 3 = r > alpha/2, 0 = outside support
  int region(const Vec3& p) const;
  Vec3 apply(const Vec3& p) const;
  Vec3 apply_inverse(const Vec3& p) const;
  // chain rule: DL(tilde) * D tilde
  Mat3 jacobian(const Vec3& p) const;
  // the same matrix assembled from the per-region block formulas
  Mat3 block_jacobian(const Vec3& p) const;
  // row C of region 3 (zero elsewhere)
  std::array<double, 2> c_row(const Vec3& p) const;
  bool smooth_near(const Vec3& p, double radius) const;

  const Chi& chi() const { return chi_; }
  const ModificationFamily& family() const { return fam_; }
  double K() const { return chi_.K(); }
  double delta() const { return chi_.delta(); }
  double alpha() const { return chi_.alpha(); }

  // unscaled tilde-Gamma: (Gamma_{rho(z)}(x, y), z) and its derivative (rows A|B, 0 0 1)
  static Vec3 tilde(const ModificationFamily& fam, const Vec3& p, Mat3* jac);

 private:
  Vec3 tilde_scaled(const Vec3& p, Mat3* jac) const;
  Vec3 lift(const Vec3& p, Mat3* jac) const;
  Vec3 lift_inverse(const Vec3& q) const;

  ModificationFamily fam_;
  Chi chi_;
};

struct RegionMargin {
  int region = 0;
  int samples = 0;
  double min_slack = 0;      // worst containment slack (radians)
  double min_expansion = 0;  // worst |DG u| over unit u in outer
  double max_area_defect = 0;
  Vec3 worst_point;
};

struct GammaHatCertificate {
  double K = 0, delta = 0, alpha = 0;
  double eta = 0;
  std::array<RegionMargin, 3> regions;
  double max_c_norm = 0, c_bound = 0;
  Mat3 max_abs_jacobian;  // entrywise bound over samples
  int attempts = 0;
  bool pass = false;
};

struct TuneOptions {
  int grid = 21;
  int cone_samples = 72;
  double margin = deg(0.5);
  int max_k_doublings = 10;
  int max_delta_halvings = 12;
  int max_alpha_halvings = 24;
};

struct TunedGammaHat {
  std::shared_ptr<const GammaHat> kernel;
  GammaHatCertificate certificate;
};

TunedGammaHat tune_gamma_hat(const Cone& inner, const Cone& outer, double eta, const ModificationFamily& fam,
                             const TuneOptions& opt = {});
// certify fixed parameters (same sampling as the search)
GammaHatCertificate certify_gamma_hat(const GammaHat& g, const Cone& inner, const Cone& outer, double eta,
                                      const TuneOptions& opt = {});

// ---- surgery on charted maps

struct SurgerySpec {
  std::string target;  // marked point name
  double scale = 0.05; // support radius
  ModificationFamily family;
  std::optional<double> K, delta, alpha;
  double eta = 0.1;
  double inner_aperture = deg(10);
  double outer_aperture = deg(30);
};

void to_json(nlohmann::json& j, const SurgerySpec& s);
SurgerySpec surgery_spec_from_json(const nlohmann::json& j);

class SurgeredMap final : public ChartedMap {
 public:
  SurgeredMap(MapPtr base, SurgerySpec spec, std::shared_ptr<const GammaHat> kernel,
              GammaHatCertificate cert, Vec3 centre);

  std::string name() const override;
  const Chart& chart() const override { return base_->chart(); }
  std::vector<Box3> branch_domains() const override { return base_->branch_domains(); }
  std::optional<Vec3> forward_branch(const Vec3& p, int branch) const override;
  std::optional<Vec3> try_forward(const Vec3& p) const override;
  std::optional<Vec3> try_inverse(const Vec3& p) const override;
  Mat3 jacobian(const Vec3& p) const override;
  Mat3 lipschitz_matrix(const Box3& where) const override;
  std::vector<MarkedPoint> marked_points() const override;
  Vec3 metric_scale() const override { return base_->metric_scale(); }
  std::vector<Vec3> sample_hints() const override;
  bool smooth_near(const Vec3& p, double radius) const override;

  // the local modification h (identity off the support)
  Vec3 h(const Vec3& y) const;
  Vec3 h_inverse(const Vec3& y) const;
  Mat3 h_jacobian(const Vec3& y) const;
  bool in_support(const Vec3& y, double slack = 0) const;

  const SurgerySpec& spec() const { return spec_; }
  const GammaHat& kernel() const { return *kernel_; }
  const GammaHatCertificate& certificate() const { return cert_; }
  const MapPtr& base() const { return base_; }
  Vec3 centre() const { return centre_; }
  double homothety() const { return eps_; }

 private:
  MapPtr base_;
  SurgerySpec spec_;
  std::shared_ptr<const GammaHat> kernel_;
  GammaHatCertificate cert_;
  Vec3 centre_;
  double eps_;
  Mat3 kernel_lip_;
};

std::shared_ptr<const SurgeredMap> apply_surgery(const MapPtr& f, const SurgerySpec& spec);

}  // namespace phmp
