#include "shearhopf/spectral_regions.hpp"

#include <cmath>
#include <numbers>

#include "shearhopf/errors.hpp"

namespace shearhopf {

void RegionParams::validate() const {
  if (!(nu > 0.0) || !(alpha > 0.0) || !(eta > 0.0) || !(eta < alpha))
    throw InvalidParameter("RegionParams: need nu > 0, alpha > 0, 0 < eta < alpha");
}

namespace {

bool region_with_width(cd lambda, const RegionParams& rp, double width, double nu_alpha_factor) {
  const double nu = rp.nu, a2 = rp.alpha * rp.alpha, e2 = rp.eta * rp.eta;
  const double re = lambda.real(), im = lambda.imag();
  if (!(re < -nu * (a2 - e2))) return false;
  const double parab = -nu_alpha_factor * im * im / (width * width + 4.0 * nu * nu * e2) + nu * e2;
  if (re < parab) return true;
  const double arg = std::abs(std::arg(lambda + nu * a2));
  return arg >= 2.0 * std::numbers::pi / 3.0;
}

}  // namespace

bool in_sigma_uplus(cd lambda, const RegionParams& rp) {
  return region_with_width(lambda, rp, rp.u_plus, rp.nu);
}

bool in_sigma_uplus_omega(cd lambda, const RegionParams& rp) {
  if (!rp.omega) throw InvalidParameter("in_sigma_uplus_omega: omega not set");
  const double w = *rp.omega;
  if (w == 0.0) return in_sigma_uplus(lambda, rp);
  // The frame shift adds omega/alpha to the convective speed.
  return region_with_width(lambda, rp, rp.u_plus + w / rp.alpha, rp.nu);
}

Contour build_gamma_contour(const RegionParams& rp, double delta, double gamma_depth, double a,
                            double ray_tilt, double ray_length) {
  rp.validate();
  if (!(delta > 0.0 && delta < gamma_depth && gamma_depth < a))
    throw InvalidParameter("build_gamma_contour: need 0 < delta < gamma_depth < A");
  const double pi = std::numbers::pi;
  if (ray_length <= 0.0) ray_length = 4.0 * a;
  std::vector<cd> upper;
  const int n_arc = 8;
  for (int i = 0; i <= n_arc; ++i) upper.push_back(std::polar(delta, 0.5 * pi * i / n_arc));
  upper.emplace_back(-gamma_depth, delta);
  upper.emplace_back(-gamma_depth, a);
  const cd corner(-gamma_depth, a);
  upper.push_back(corner + std::polar(ray_length, 2.0 * pi / 3.0 - ray_tilt));

  Contour c;
  c.vertices = upper;
  for (int i = static_cast<int>(upper.size()) - 1; i >= 1; --i)
    c.vertices.push_back(std::conj(upper[i]));
  for (const cd& v : c.vertices)
    if (in_sigma_uplus(v, rp)) throw NumericalError("build_gamma_contour: contour meets the essential-spectrum region");
  // Edges are checked at interior samples as well.
  const std::size_t nv = c.vertices.size();
  for (std::size_t i = 0; i + 1 < nv; ++i) {
    for (int k = 1; k < 64; ++k) {
      cd p = c.vertices[i] + (c.vertices[i + 1] - c.vertices[i]) * (k / 64.0);
      if (in_sigma_uplus(p, rp)) throw NumericalError("build_gamma_contour: contour meets the essential-spectrum region");
    }
  }
  return c;
}

std::vector<std::vector<cd>> region_boundary(const RegionParams& rp, double re_min, double im_max,
                                             int n_samples) {
  rp.validate();
  const double nu = rp.nu, a2 = rp.alpha * rp.alpha, e2 = rp.eta * rp.eta;
  const double width2 = rp.u_plus * rp.u_plus + 4.0 * nu * nu * e2;
  const double re_cap = -nu * (a2 - e2);
  std::vector<std::vector<cd>> out;
  // Parabola arcs clipped at the vertical line Re = -nu(alpha^2 - eta^2).
  for (int sign : {1, -1}) {
    std::vector<cd> arc;
    for (int i = 0; i < n_samples; ++i) {
      double im = sign * im_max * i / (n_samples - 1);
      double re = std::min(-nu * im * im / width2 + nu * e2, re_cap);
      if (re < re_min) break;
      arc.emplace_back(re, im);
    }
    out.push_back(arc);
  }
  // Sector rays from -nu alpha^2 at angle +-2pi/3.
  for (int sign : {1, -1}) {
    std::vector<cd> ray;
    const cd apex(-nu * a2, 0.0);
    const cd dir = std::polar(1.0, sign * 2.0 * std::numbers::pi / 3.0);
    const double len = std::abs(re_min - apex.real()) / 0.5;
    for (int i = 0; i < n_samples; ++i) ray.push_back(apex + dir * (len * i / (n_samples - 1)));
    out.push_back(ray);
  }
  return out;
}

Contour circle_contour(cd center, double radius, int n) {
  Contour c;
  for (int i = 0; i < n; ++i)
    c.vertices.push_back(center + std::polar(radius, 2.0 * std::numbers::pi * i / n));
  return c;
}

Contour rectangle_contour(double re_lo, double re_hi, double im_lo, double im_hi) {
  Contour c;
  c.vertices = {cd(re_lo, im_lo), cd(re_hi, im_lo), cd(re_hi, im_hi), cd(re_lo, im_hi)};
  return c;
}

}  // namespace shearhopf
