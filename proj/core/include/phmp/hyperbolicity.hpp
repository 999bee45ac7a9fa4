#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phmp/chain_recurrence.hpp"
#include "phmp/charted_map.hpp"
#include "phmp/cones.hpp"
#include "phmp/markov.hpp"

namespace phmp {

// Cones and planes live in metric coordinates (tangent vectors scaled by metric_scale).
// A field is either one analytic value everywhere or piecewise constant on a box grid.
struct ConeField {
  std::string name;
  std::optional<BoxGrid> grid;
  std::vector<Cone> cones;  // one entry, or one per grid cell

  // throws ErrorKind::coverage when p falls outside a tabulated grid
  const Cone& at(const ChartedMap& f, const Vec3& p) const;
};

struct PlaneField {
  std::string name;
  std::optional<BoxGrid> grid;
  std::vector<Plane> planes;

  const Plane& at(const ChartedMap& f, const Vec3& p) const;
};

ConeField uniform_cone_field(const std::string& name, const Cone& c);
// checks validity and the < 30 degree axis variation between face neighbours
ConeField tabulated_cone_field(const std::string& name, const BoxGrid& grid, std::vector<Cone> cones);
// "solenoid-theta-cone", "vertical-cone", "axis-x", "axis-y", "axis-z"
ConeField named_cone_field(const std::string& name, double aperture);

PlaneField uniform_plane_field(const std::string& name, const Plane& p);
// "fiber-plane", "xy-plane", "plane-x", "plane-y", "plane-z" (named by the normal)
PlaneField named_plane_field(const std::string& name);

struct CertifyOptions {
  int samples_per_box = 8;  // rounded up to a cube lattice
  double margin = deg(0.5);
  double expansion_floor = 1.5;
  int cone_samples = 72;
  int rings = 4, azimuths = 24;  // interior rays for the expansion test
};

struct ConeCertificate {
  std::string kind;  // "unstable" or "dominated"
  std::string field;
  int boxes = 0;
  int points = 0;
  int escaped = 0;  // sampled points whose image left the region
  double margin = 0;
  double expansion_floor = 0;
  double min_slack = 0;
  Vec3 worst_slack_point;
  double min_expansion = 0;
  Vec3 worst_expansion_point;
  Vec3 witness;  // metric vector realising min_expansion (or min_slack for dominated)
  bool pass = false;
};

ConeCertificate certify_unstable_cones(const ChartedMap& f, const BoxSet& region, const ConeField& cf,
                                       const CertifyOptions& opt = {});
ConeCertificate certify_dominated(const ChartedMap& f, const BoxSet& region, const ConeField& cf,
                                  const CertifyOptions& opt = {});

struct NormalStep {
  Mat2 matrix;
  double det = 0;
};

// projected restriction of a metric jacobian P -> Q along eu
NormalStep normal_step(const Mat3& jm, const Plane& p, const Plane& q, const Vec3& eu);
// one step of the normal-bundle cocycle at x; eu is the cone core at f(x)
NormalStep normal_cocycle_step(const ChartedMap& f, const PlaneField& pf, const ConeField& cf, const Vec3& x);

// max |N(H) N(F) - N(HF)| over random linear F, H with H e2 parallel to e3
double composition_identity_error(std::uint64_t seed, int trials);

struct VolumeOptions {
  double lambda_bar = 0.15;
  int orbit_len = 20;
  int orbits = 256;
  std::uint64_t seed = 0;
};

struct VolumeCertificate {
  double lambda_bar = 0;
  int orbits = 0;
  int steps = 0;
  int truncated = 0;  // orbits that left the region early
  double max_det = 0;
  Vec3 worst_det_point;
  double min_expansion = 0;  // one-step |Df eu| along the sampled orbits
  double cone_floor = 0;     // from the unstable certificate
  double axis_spread = 0;    // largest angle between cone cores at consecutive orbit points (radians)
  bool pass = false;
};

// `unstable` must be a passing unstable-cone certificate for the same field
VolumeCertificate certify_volume_hyperbolic(const ChartedMap& f, const BoxSet& region, const PlaneField& pf,
                                            const ConeField& cf, const ConeCertificate& unstable,
                                            const VolumeOptions& opt = {});

struct StableManifoldOptions {
  int angles = 16;
  double min_radius = 1e-7;
  int iterations = 80;
  double tol = 1e-6;
};

struct StableManifoldVerdict {
  std::string point;
  int period = 1;
  int samples = 0;
  int escaped = 0;
  int unconverged = 0;
  double worst_distance = 0;
  Vec3 witness;
  std::string reason;
  bool pass = false;
};

StableManifoldVerdict check_large_stable_manifold(const ChartedMap& f, const MarkovPartition& mp,
                                                  const std::string& point, const StableManifoldOptions& opt = {});

nlohmann::json to_json(const ConeCertificate& c);
nlohmann::json to_json(const VolumeCertificate& c);
nlohmann::json to_json(const StableManifoldVerdict& v);

}  // namespace phmp
