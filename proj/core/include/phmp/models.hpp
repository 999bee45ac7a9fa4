#pragma once

#include <string>
#include <vector>

#include "phmp/charted_map.hpp"

namespace phmp {

// solid torus (theta, u, v), theta periodic in [0, 1)
class SolenoidModel final : public ChartedMap {
 public:
  explicit SolenoidModel(double lambda = 0.25, double offset = 0.5);

  std::string name() const override { return "solenoid"; }
  const Chart& chart() const override { return chart_; }
  std::optional<Vec3> try_forward(const Vec3& p) const override;
  std::optional<Vec3> try_inverse(const Vec3& p) const override;
  Mat3 jacobian(const Vec3& p) const override;
  Mat3 lipschitz_matrix(const Box3& where) const override;
  std::vector<MarkedPoint> marked_points() const override;
  Vec3 metric_scale() const override;

  double lambda() const { return lambda_; }
  double offset() const { return c_; }

 private:
  double lambda_, c_;
  Chart chart_;
};

// two affine branches over the disc D x [0,1]; the middle band escapes downwards
class HorseshoeModel final : public ChartedMap {
 public:
  HorseshoeModel();

  std::string name() const override { return "horseshoe3d"; }
  const Chart& chart() const override { return chart_; }
  std::vector<Box3> branch_domains() const override;
  std::optional<Vec3> forward_branch(const Vec3& p, int branch) const override;
  std::optional<Vec3> try_forward(const Vec3& p) const override;
  std::optional<Vec3> try_inverse(const Vec3& p) const override;
  Mat3 jacobian(const Vec3& p) const override;
  Mat3 lipschitz_matrix(const Box3& where) const override;
  std::vector<MarkedPoint> marked_points() const override;
  bool smooth_near(const Vec3& p, double radius) const override;

  int branch_of(const Vec3& p) const;

 private:
  Chart chart_;
};

// f(p) = p / 2 on [-1,1]^3
class ContractionModel final : public ChartedMap {
 public:
  ContractionModel();
  std::string name() const override { return "contraction"; }
  const Chart& chart() const override { return chart_; }
  std::optional<Vec3> try_forward(const Vec3& p) const override;
  std::optional<Vec3> try_inverse(const Vec3& p) const override;
  Mat3 jacobian(const Vec3& p) const override;
  Mat3 lipschitz_matrix(const Box3& where) const override;
  std::vector<MarkedPoint> marked_points() const override;

 private:
  Chart chart_;
};

// two half-boxes of [-2,2]x[-1,1]^2, each contracting onto its own centre (+-1, 0, 0)
class TwoContractionsModel final : public ChartedMap {
 public:
  TwoContractionsModel();
  std::string name() const override { return "two-contractions"; }
  const Chart& chart() const override { return chart_; }
  std::vector<Box3> branch_domains() const override;
  std::optional<Vec3> forward_branch(const Vec3& p, int branch) const override;
  std::optional<Vec3> try_forward(const Vec3& p) const override;
  std::optional<Vec3> try_inverse(const Vec3& p) const override;
  Mat3 jacobian(const Vec3& p) const override;
  Mat3 lipschitz_matrix(const Box3& where) const override;
  bool smooth_near(const Vec3& p, double radius) const override;

 private:
  Chart chart_;
};

// x -> 4x/(1+3x) on [0,1], transverse coordinates halved: source at x = 0, sink at x = 1
class NorthSouthModel final : public ChartedMap {
 public:
  NorthSouthModel();
  std::string name() const override { return "north-south"; }
  const Chart& chart() const override { return chart_; }
  std::optional<Vec3> try_forward(const Vec3& p) const override;
  std::optional<Vec3> try_inverse(const Vec3& p) const override;
  Mat3 jacobian(const Vec3& p) const override;
  Mat3 lipschitz_matrix(const Box3& where) const override;
  std::vector<MarkedPoint> marked_points() const override;

 private:
  Chart chart_;
};

class IdentityModel final : public ChartedMap {
 public:
  IdentityModel();
  std::string name() const override { return "identity"; }
  const Chart& chart() const override { return chart_; }
  std::optional<Vec3> try_forward(const Vec3& p) const override;
  std::optional<Vec3> try_inverse(const Vec3& p) const override;
  Mat3 jacobian(const Vec3& p) const override;
  Mat3 lipschitz_matrix(const Box3& where) const override;

 private:
  Chart chart_;
};

std::vector<std::string> model_names();
// throws usage error for unknown names
MapPtr make_model(const std::string& name);

}  // namespace phmp
