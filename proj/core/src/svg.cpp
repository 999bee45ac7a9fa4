#include <algorithm>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "phmp/error.hpp"
#include "phmp/svg.hpp"

namespace phmp {

namespace {
constexpr double kSize = 480, kPad = 40;
}

bool SlicePlot::Rect::operator<(const Rect& o) const {
  return std::tie(fill, lo, hi) < std::tie(o.fill, o.lo, o.hi);
}

SlicePlot::SlicePlot(const Box3& domain, SlicePlane plane, std::string title)
    : domain_(domain), plane_(plane), title_(std::move(title)) {
  if (plane.axis < 0 || plane.axis > 2) throw Error(ErrorKind::invalid_parameters, "slice axis must be 0, 1 or 2");
  if (plane.value < domain.lo[plane.axis] || plane.value > domain.hi[plane.axis])
    throw Error(ErrorKind::invalid_parameters, "slice plane does not meet the domain");
  axes_ = plane.axis == 0 ? std::array{1, 2} : (plane.axis == 1 ? std::array{0, 2} : std::array{0, 1});
}

void SlicePlot::add_boxes(const BoxSet& s, const std::string& fill, const std::string& label) {
  for (int b : s.boxes) {
    Box3 c = s.grid.cell(b);
    if (plane_.value < c.lo[plane_.axis] || plane_.value >= c.hi[plane_.axis]) {
      // the top face of the grid still belongs to the last layer
      if (!(plane_.value == c.hi[plane_.axis] && c.hi[plane_.axis] == s.grid.box.hi[plane_.axis])) continue;
    }
    rects_.push_back({{c.lo[axes_[0]], c.lo[axes_[1]]}, {c.hi[axes_[0]], c.hi[axes_[1]]}, fill});
  }
  legend_.push_back(fmt::format("{} ({})", label, fill));
}

void SlicePlot::add_rect(const Point2& lo, const Point2& hi, const std::string& fill) { rects_.push_back({lo, hi, fill}); }
void SlicePlot::add_curve(const Curve2& c, const std::string& stroke) { curves_.push_back({c, stroke}); }
void SlicePlot::add_point(const Point2& p, const std::string& label) { points_.push_back({p, label}); }

std::string SlicePlot::render() const {
  const double x0 = domain_.lo[axes_[0]], x1 = domain_.hi[axes_[0]];
  const double y0 = domain_.lo[axes_[1]], y1 = domain_.hi[axes_[1]];
  const double s = kSize / std::max(x1 - x0, y1 - y0);
  auto X = [&](double x) { return kPad + (x - x0) * s; };
  auto Y = [&](double y) { return kPad + (y1 - y) * s; };  // y grows upwards
  const double w = 2 * kPad + (x1 - x0) * s, h = 2 * kPad + (y1 - y0) * s;
  const char* names = "xyz";

  std::ostringstream o;
  o << fmt::format("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
                   w, h, w, h);
  o << fmt::format("<title>{}</title>\n", title_);
  o << fmt::format("<text x=\"{:.1f}\" y=\"20\" font-size=\"14\">{} ({} = {:g})</text>\n", kPad, title_,
                   names[plane_.axis], plane_.value);
  if (empty()) o << fmt::format("<text x=\"{:.1f}\" y=\"34\" font-size=\"11\" fill=\"#a00\">empty slice</text>\n", kPad);
  // axes
  o << fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"black\"/>\n",
                   X(x0), Y(y1), (x1 - x0) * s, (y1 - y0) * s);
  o << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\">{}</text>\n", X(x1) + 4, Y(y0), names[axes_[0]]);
  o << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"12\">{}</text>\n", X(x0), Y(y1) - 4, names[axes_[1]]);
  o << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\">{:g}</text>\n", X(x0), Y(y0) + 14, x0);
  o << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"10\">{:g}</text>\n", X(x1) - 10, Y(y0) + 14, x1);

  auto rects = rects_;
  std::sort(rects.begin(), rects.end());
  for (const auto& r : rects)
    o << fmt::format("<rect x=\"{:.3f}\" y=\"{:.3f}\" width=\"{:.3f}\" height=\"{:.3f}\" fill=\"{}\"/>\n", X(r.lo[0]),
                     Y(r.hi[1]), (r.hi[0] - r.lo[0]) * s, (r.hi[1] - r.lo[1]) * s, r.fill);
  for (const auto& c : curves_) {
    o << "<polyline fill=\"none\" stroke=\"" << c.stroke << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < c.pts.size(); ++k)
      o << (k ? " " : "") << fmt::format("{:.3f},{:.3f}", X(c.pts[k][0]), Y(c.pts[k][1]));
    o << "\"/>\n";
  }
  auto pts = points_;
  std::sort(pts.begin(), pts.end(), [](const Mark& a, const Mark& b) { return std::tie(a.label, a.p) < std::tie(b.label, b.p); });
  for (const auto& p : pts) {
    o << fmt::format("<circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"3\" fill=\"black\"/>\n", X(p.p[0]), Y(p.p[1]));
    o << fmt::format("<text x=\"{:.3f}\" y=\"{:.3f}\" font-size=\"11\">{}</text>\n", X(p.p[0]) + 5, Y(p.p[1]) - 5, p.label);
  }
  for (std::size_t k = 0; k < legend_.size(); ++k)
    o << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\">{}</text>\n", kPad, h - 8 - 14.0 * k, legend_[k]);
  o << "</svg>\n";
  return o.str();
}

std::string delta_d_svg(const DeltaD& d, const std::vector<Curve2>& curves) {
  const DiscRaster& r = d.raster;
  Box3 dom;
  dom.lo = r.disc.center - Vec3{r.disc.radius, r.disc.radius, r.disc.radius};
  dom.hi = r.disc.center + Vec3{r.disc.radius, r.disc.radius, r.disc.radius};
  SlicePlot plot(dom, {r.disc.normal_axis, r.disc.center[r.disc.normal_axis]}, "obstacles in the disc of " + d.point);
  for (int i = 0; i < r.n; ++i)
    for (int j = 0; j < r.n; ++j) {
      auto lab = r.at(i, j);
      if (lab < 2) continue;
      Point2 c = r.center(i, j);
      plot.add_rect({c[0] - r.h / 2, c[1] - r.h / 2}, {c[0] + r.h / 2, c[1] + r.h / 2}, lab == 3 ? "#d62728" : "#c7c7c7");
    }
  const std::array<std::string, 2> colours{"#1f77b4", "#2ca02c"};
  for (std::size_t k = 0; k < curves.size(); ++k) plot.add_curve(curves[k], colours[k % 2]);
  // disc outline
  Curve2 rim;
  for (int k = 0; k <= 96; ++k) {
    double t = 2 * kPi * k / 96;
    rim.push_back({r.disc.center[r.axes[0]] + r.disc.radius * std::cos(t), r.disc.center[r.axes[1]] + r.disc.radius * std::sin(t)});
  }
  plot.add_curve(rim, "black");
  return plot.render();
}

}  // namespace phmp
