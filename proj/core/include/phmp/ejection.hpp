#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phmp/charted_map.hpp"
#include "phmp/markov.hpp"

namespace phmp {

using Point2 = std::array<double, 2>;
using Curve2 = std::vector<Point2>;  // closed or open polyline in disc-plane coordinates

// raster of a flat centre-stable disc; plane coordinates are the two non-normal axes in
// increasing order
struct DiscRaster {
  FlatDisc disc;
  std::array<int, 2> axes{0, 1};
  int n = 0;
  double h = 0;
  Point2 origin{};  // lower corner of the square around the disc
  // 0 outside the disc, 1 annulus, 2 image of the disc, 3 obstacle (rest of the image of R)
  std::vector<std::uint8_t> label;

  Point2 center(int i, int j) const { return {origin[0] + (i + 0.5) * h, origin[1] + (j + 0.5) * h}; }
  std::uint8_t at(int i, int j) const { return label[static_cast<std::size_t>(i) * n + j]; }
  Vec3 lift(const Point2& q) const;
};

struct DeltaComponent {
  int cells = 0;
  double area = 0;
  Point2 lo{}, hi{}, centroid{};
};

struct DeltaD {
  std::string point;
  int period = 1;
  int resolution = 0;
  DiscRaster raster;
  std::vector<DeltaComponent> components;
  int doubled_count = -1;  // component count at twice the resolution
  bool inconclusive = false;
  std::string reason;
};

DeltaD delta_d_components(const ChartedMap& f, const MarkovPartition& mp, const std::string& point, int resolution,
                          bool check_doubling = true);

struct EjectionCertificate {
  DeltaD delta;
  // (a) curves against the obstacles
  double min_clearance_cells = 0;
  Point2 clearance_witness{};
  bool curves_clear = false;
  // (b) chain class of the orbit at the tested scale
  double epsilon = 0;
  int resolution = 0;
  int orbit_boxes = 0;
  int class_boxes = 0;
  int far_boxes = 0;
  bool class_trivial = false;
  bool certified = false;
  bool inconclusive = false;
};

// curves must stay in the annulus between the disc boundary and the image of the disc
EjectionCertificate ejection_certificate(const ChartedMap& f, const MarkovPartition& mp, const std::string& point,
                                         const std::vector<Curve2>& curves, double epsilon, int resolution);

nlohmann::json to_json(const DeltaD& d);
nlohmann::json to_json(const EjectionCertificate& c);

}  // namespace phmp
