#pragma once

#include <complex>
#include <vector>

#include "shearhopf/errors.hpp"
#include "shearhopf/grid.hpp"
#include "shearhopf/profile.hpp"
#include "shearhopf/spectral_regions.hpp"

namespace shearhopf {

// Mode-n temporal problem. The perturbation is psi(y) e^{i n alpha x + lambda t}
// with velocity (-D psi, i n alpha psi), giving
//   [lambda - nu(D^2 - k^2) + i k U](D^2 - k^2) psi - i k U'' psi = 0,  k = n alpha.
struct OSParams {
  double alpha = 0.0;
  int n = 1;
  double nu = 0.0;
  ShearProfile profile;
  double eta = 0.0;
  GridPtr grid;         // grid for eigenfunctions and the discrete adjoint
  double tol = 1e-10;   // marcher tolerance
  double y_far = 0.0;   // start of the far-field march; 0 selects a default from gamma

  double k() const { return n * alpha; }
  double march_start() const;
  RegionParams region() const;
  void validate() const;
};

class EssentialSpectrumHit : public NumericalError {
 public:
  EssentialSpectrumHit(const std::string& what, cd lambda) : NumericalError(what), lambda(lambda) {}
  cd lambda;
};

struct Eigenpair {
  cd lambda;
  ModeFunction psi;       // max |psi| = 1, real positive at the argmax node
  // Discrete eigenvector as solved, before the exact far-field tail is imposed
  // on psi. Same normalization.
  ModeFunction psi_galerkin;
  double residual = 0.0;  // |Delta(lambda)| relative to |Delta| at distance 0.1
  cd s;                   // far-field decay root, Re s > 0
  cd galerkin_lambda;     // eigenvalue of the discrete operator used for psi
  int iterations = 0;
  // Lies inside the classified essential-spectrum region. Damped modes on the
  // stable side usually do; such roots are not reported as discrete eigenvalues.
  bool in_region = false;
};

struct AdjointPair {
  VelocityMode zeta_star;
  cd normalization = 1.0;  // <zeta, zeta*> after scaling
  cd galerkin_lambda;
};

// Decay root of the far-field equation: s^2 = k^2 + (lambda + i k U+)/nu.
cd far_field_root(const OSParams& p, cd lambda);

struct DispersionValue {
  cd value;
  cd derivative;  // d Delta / d lambda (zero unless requested)
  cd s;
  int steps = 0;
};

// Compound-matrix determinant of the wall conditions. Analytic in lambda
// off the branch cut of s; its zeros are the eigenvalues.
cd dispersion(const OSParams& p, cd lambda);
DispersionValue dispersion_full(const OSParams& p, cd lambda, bool with_derivative);

struct SearchOptions {
  int max_iter = 60;
  double step_tol = 1e-12;
  bool reject_essential = true;  // throw when Re s <= eta (not an admissible mode)
};

Eigenpair eigen_search(const OSParams& p, cd lambda0, const SearchOptions& opt = {});

enum class ContourCheck {
  region,      // reject contours meeting the classified essential-spectrum region
  admissible,  // only require Re s > eta along the contour (Delta analytic there)
};

// Argument principle along a closed polyline.
int count_in_contour(const OSParams& p, const Contour& contour,
                     ContourCheck check = ContourCheck::region);

VelocityMode eigenfunction_velocity(const Eigenpair& e, const OSParams& p);

// Discrete adjoint eigenvector as a velocity field with <zeta, zeta*> = 1.
AdjointPair adjoint_eigenfunction(const Eigenpair& e, const OSParams& p, bool check_simple = true);

// Roots from Newton runs started on a seeds_re x seeds_im lattice over
// Re in [re_lo, re_hi], Im in [im_lo, im_hi]; duplicates merged, roots inside
// the classified region dropped. Sorted by decreasing real part.
std::vector<cd> multi_seed_scan(const OSParams& p, double re_lo, double re_hi, double im_lo,
                                double im_hi, int seeds_re, int seeds_im);

// Default seeding rectangle: Re in [-2 nu alpha^2, 0.5], Im in [-2 k U+, 0].
std::vector<cd> multi_seed_scan(const OSParams& p, int seeds_re = 16, int seeds_im = 16);

// Admissible eigenvalue (Re s > eta) with the largest real part, seeded from
// the discrete operator and refined by eigen_search.
Eigenpair leading_eigenpair(const OSParams& p);

}  // namespace shearhopf
