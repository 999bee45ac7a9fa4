#pragma once

#include <string>
#include <vector>

#include "phmp/chain_recurrence.hpp"
#include "phmp/ejection.hpp"

namespace phmp {

// axis-aligned slice {p[axis] = value}; the plot shows the two remaining axes in increasing order
struct SlicePlane {
  int axis = 0;
  double value = 0;
};

class SlicePlot {
 public:
  // throws invalid_parameters when the plane misses the domain
  SlicePlot(const Box3& domain, SlicePlane plane, std::string title);

  // cells of s that meet the plane
  void add_boxes(const BoxSet& s, const std::string& fill, const std::string& label);
  void add_rect(const Point2& lo, const Point2& hi, const std::string& fill);
  void add_curve(const Curve2& c, const std::string& stroke);
  void add_point(const Point2& p, const std::string& label);

  bool empty() const { return rects_.empty() && curves_.empty() && points_.empty(); }
  // deterministic output: primitives are sorted before writing
  std::string render() const;

 private:
  struct Rect {
    Point2 lo, hi;
    std::string fill;
    bool operator<(const Rect& o) const;
  };
  struct Line {
    Curve2 pts;
    std::string stroke;
  };
  struct Mark {
    Point2 p;
    std::string label;
  };

  Box3 domain_;
  SlicePlane plane_;
  std::array<int, 2> axes_{};
  std::string title_;
  std::vector<Rect> rects_;
  std::vector<Line> curves_;
  std::vector<Mark> points_;
  std::vector<std::string> legend_;
};

// obstacle cells, the image of the disc and optional certificate curves
std::string delta_d_svg(const DeltaD& d, const std::vector<Curve2>& curves = {});

}  // namespace phmp
