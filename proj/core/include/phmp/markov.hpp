#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phmp/charted_map.hpp"
#include "phmp/cones.hpp"

namespace phmp {

// coordinate box with the cylinder axis `vertical_axis`; with fiber_radius the cross
// section is the disc of that radius around the fiber centre of the box
struct Rectangle {
  std::string chart;
  Box3 box;
  int vertical_axis = 2;
  std::optional<double> fiber_radius;
  std::string label;
  // refined pieces: x belongs iff f^{-i}(x) lies in parent rectangle itinerary[i - itinerary_start]
  std::vector<int> itinerary;
  int itinerary_start = 0;
};

// attracting / repelling regions; only the flagged boundary parts count as boundary
// (a slab has no side wall, an infinite cylinder no lids)
struct Region {
  Box3 box;
  int vertical_axis = 2;
  std::optional<double> fiber_radius;
  bool side_boundary = true;
  bool lid_boundary = true;
};

enum class PartitionType { saddle, attracting };

struct MarkovPartition {
  PartitionType type = PartitionType::saddle;
  std::vector<Rectangle> rectangles;
  std::optional<Region> attracting_region;
  std::optional<Region> repelling_region;
  std::vector<std::pair<int, int>> adjacency;
  // refined partitions: itineraries refer to the parent's rectangles
  std::shared_ptr<const MarkovPartition> parent;
  bool strict_lids = true;  // undeclared lid contacts count as violations

  std::size_t size() const { return rectangles.size(); }
};

std::string to_string(PartitionType t);

// geometric tests, periodic coordinates taken next to the rectangle
bool in_rectangle(const ChartedMap& f, const Rectangle& r, const Vec3& p, double slack = 0);
// membership including the itinerary condition of refined pieces
bool member(const ChartedMap& f, const MarkovPartition& mp, int i, const Vec3& p);
bool in_family(const ChartedMap& f, const MarkovPartition& mp, const Vec3& p);
// signed distance to the flagged boundary parts, positive inside
double region_clearance(const ChartedMap& f, const Region& r, const Vec3& p);

void validate(const MarkovPartition& mp);

enum class ComponentKind { vertical, lid_collapsed, violation };
std::string to_string(ComponentKind k);

struct Component {
  int source = 0;  // j: component of f(R_j) ∩ R_i
  int target = 0;  // i
  ComponentKind kind = ComponentKind::violation;
  int cells = 0;
  int layers = 0;
  bool bottom = false, top = false;
  double side_clearance = 0;
  int bottom_pieces = 0, top_pieces = 0;
  Box3 hull;
  std::string reason;
};

struct FiltrationCheck {
  std::string what;  // "f(A) in int(A)" or "f^-1(R) in int(R)"
  int samples = 0;
  double min_clearance = 0;
  Vec3 worst;
  bool pass = false;
};

struct PartitionReport {
  int resolution = 0;
  double margin = 0;
  std::vector<Component> components;
  std::vector<std::vector<int>> incidence;  // incidence[j][i]: components of f(R_j) ∩ R_i
  std::vector<std::string> violations;
  std::vector<FiltrationCheck> filtration;
  bool inconclusive = false;
  std::string inconclusive_reason;
  bool pass = false;
};

struct RasterOptions {
  int resolution = 64;
  std::optional<double> margin;  // default two cells of the finest fiber raster
  bool check_doubling = true;
};

PartitionReport verify_partition(const ChartedMap& f, const MarkovPartition& mp, const RasterOptions& opt);

struct IncidenceMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> a;  // a[i][j]: components of f(R_i) ∩ R_j
  bool inconclusive = false;
};

IncidenceMatrix incidence_matrix(const ChartedMap& f, const MarkovPartition& mp, int resolution,
                                 bool check_doubling = true);

struct PowerVerdict {
  bool verdict = false;
  int exponent = 0;  // first n with A^n > 0 (mixing); max n(i,j) (transitive); 0 if none
};

PowerVerdict is_mixing(const std::vector<std::vector<int>>& a, int n_max);
PowerVerdict is_transitive(const std::vector<std::vector<int>>& a, int n_max);

// pieces of the intersection of f^i(R) for m <= i <= n
MarkovPartition refine(const ChartedMap& f, const MarkovPartition& mp, int m, int n, int resolution);

using Polyline = std::vector<Vec3>;

struct GrowthReport {
  int n0 = -1;                               // -1: not reached within n_max
  std::vector<std::vector<int>> crossings;   // crossings[n][i]: lid-to-lid runs in R_i after n iterates
  bool monotone = true;
  std::vector<std::size_t> points;          // polyline size per iterate
};

// segment must be a polyline whose chords lie in the circular cone around the vertical axis
GrowthReport vertical_segment_growth(const ChartedMap& f, const MarkovPartition& mp, const Polyline& segment,
                                     int n_max, double aperture = deg(45), double chord_tol = 0);

// lid-to-lid crossings of a set of polylines inside rectangle i
int count_crossings(const ChartedMap& f, const MarkovPartition& mp, int i, const std::vector<Polyline>& curves);

// bundled partitions: solenoid four pieces, horseshoe single rectangle, identity cube
MarkovPartition solenoid_partition(double shrink = 0.95);
MarkovPartition horseshoe_partition();
MarkovPartition identity_partition();
MarkovPartition builtin_partition(const std::string& model);

nlohmann::json to_json(const MarkovPartition& mp);
MarkovPartition partition_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PartitionReport& r);
nlohmann::json to_json(const IncidenceMatrix& m);
std::string incidence_csv(const IncidenceMatrix& m);

}  // namespace phmp
