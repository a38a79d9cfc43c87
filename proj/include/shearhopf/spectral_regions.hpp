#pragma once

#include <complex>
#include <optional>
#include <vector>

namespace shearhopf {

using cd = std::complex<double>;

struct RegionParams {
  double nu = 0.0;
  double alpha = 0.0;
  double eta = 0.0;
  double u_plus = 1.0;
  std::optional<double> omega;  // frame frequency for the traveling-wave variant

  void validate() const;
};

// Closed polyline; the last vertex connects back to the first.
struct Contour {
  std::vector<cd> vertices;
};

// Parabola-bounded left region carrying the essential spectrum, as the
// conjunction: Re < -nu(alpha^2 - eta^2) and (parabola or sector).
bool in_sigma_uplus(cd lambda, const RegionParams& rp);
// Traveling-frame variant: parabola width uses (omega + alpha u_plus).
bool in_sigma_uplus_omega(cd lambda, const RegionParams& rp);

// Diagnostic contour: semicircle of radius delta at the origin, horizontal
// legs at +-i delta to Re = -gamma_depth, risers to +-i A, then rays at
// angle +-(2pi/3 - ray_tilt) out to radius ray_length. The upper half is
// traced first and the lower half is its mirror image.
Contour build_gamma_contour(const RegionParams& rp, double delta, double gamma_depth, double a,
                            double ray_tilt = 0.05, double ray_length = 0.0);

// Polyline samples of the region boundary in the window [re_min, re_max] x [-im_max, im_max].
// Each polyline is a list of boundary points (lower and upper parabola arcs, sector rays).
std::vector<std::vector<cd>> region_boundary(const RegionParams& rp, double re_min, double im_max,
                                             int n_samples);

// Closed circle polyline with n vertices, counter-clockwise.
Contour circle_contour(cd center, double radius, int n = 32);
// Axis-aligned rectangle, counter-clockwise.
Contour rectangle_contour(double re_lo, double re_hi, double im_lo, double im_hi);

}  // namespace shearhopf
