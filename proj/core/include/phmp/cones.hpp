#pragma once

#include <variant>
#include <vector>

#include "phmp/linalg.hpp"

namespace phmp {

constexpr double kPi = 3.14159265358979323846;
inline double deg(double d) { return d * kPi / 180.0; }

// double cone of half-angle aperture around +-axis
struct CircularCone {
  Vec3 axis{0, 0, 1};
  double aperture = kPi / 4;
};

// image of the standard cone |w_z| >= |(w_x, w_y)| under frame
struct LinearImageCone {
  Mat3 frame = Mat3::identity();
  Mat3 inverse = Mat3::identity();
};

using Cone = std::variant<CircularCone, LinearImageCone>;

CircularCone circular_cone(const Vec3& axis, double aperture);
LinearImageCone image_cone(const Mat3& frame);

bool contains(const Cone& c, const Vec3& v);
// linear map sending the standard cone onto c
Mat3 cone_frame(const Cone& c);
// core direction (unit); for an image cone this is frame * e_z normalized
Vec3 cone_axis(const Cone& c);
LinearImageCone push_forward(const Mat3& l, const Cone& c);

// unit boundary rays at uniform angles around the axis
std::vector<Vec3> boundary_rays(const Cone& c, int samples);
// unit vectors filling the cone: rings at fractions of the aperture, `azimuths` per ring
std::vector<Vec3> interior_rays(const Cone& c, int rings, int azimuths);

// signed angular distance of v to the boundary of c; positive inside.
// exact for circular cones, sampled over 72 directions for image cones
double angular_slack(const Cone& c, const Vec3& v);
// worst angular_slack of inner's boundary rays w.r.t. outer
double containment_slack(const Cone& inner, const Cone& outer, int samples = 360);

bool cone_strictly_contained(const Cone& inner, const Cone& outer, int samples = 360,
                             double margin = deg(0.5));

void validate(const Cone& c);

}  // namespace phmp
