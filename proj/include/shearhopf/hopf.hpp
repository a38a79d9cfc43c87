#pragma once

#include <functional>
#include <string>

#include "shearhopf/grid.hpp"
#include "shearhopf/neutral_curve.hpp"
#include "shearhopf/orr_sommerfeld.hpp"

namespace shearhopf {

// Leray projection of one harmonic (n != 0) onto solenoidal fields with vy(0) = 0.
VelocityMode helmholtz_project(const VelocityMode& u);

// The zero harmonic keeps its x-component only.
VelocityMode project_zero_mode(const VelocityMode& u);

// Unprojected symmetric advection -1/2[(u.grad)v + (v.grad)u] on harmonic n_u + n_v.
VelocityMode advection_product(const VelocityMode& u, const VelocityMode& v);

// -1/2 P[(u.grad)v + (v.grad)u], P the projection for the output harmonic.
VelocityMode bilinear_B(const VelocityMode& u, const VelocityMode& v);

// Same product evaluated by sampling both harmonics on n_x points in x,
// multiplying pointwise and extracting the output harmonic by a discrete
// Fourier sum. No projection is applied.
VelocityMode advection_product_sampled(const VelocityMode& u, const VelocityMode& v, int n_x = 16);

// Bounded solution of nu0 v'' = f, v(0) = 0, by the closed-form double
// integral with an exponential tail past y_max.
VelocityMode l0_inverse(const ModeFunction& f, double nu0, double alpha = 0.0);

// Same problem by a Galerkin solve on the grid (natural condition v'(y_max) = 0).
VelocityMode l0_inverse_galerkin(const ModeFunction& f, double nu0, double alpha = 0.0);

struct HarmonicParams {
  double alpha = 0.0;
  double nu = 0.0;
  ShearProfile profile;
  double eta = 0.0;
  double cond_limit = 1e13;  // 1/rcond above which the solve counts as resonant
  bool check_resonance = true;
};

struct ForcedSolve {
  VelocityMode w;
  Eigen::VectorXcd psi;    // stream function of w
  Eigen::VectorXcd omega;  // (D^2 - k^2) psi as carried by the mixed system
  double rcond = 0.0;      // reciprocal condition estimate of the collocation matrix
  double residual = 0.0;   // |A x - b| / |b| of the assembled system
};

// (i m omega0 - L_m) w = F by dense collocation of the curl equation in mixed
// stream-function/vorticity form, psi = D psi = 0 at both ends.
ForcedSolve solve_forced_harmonic(const VelocityMode& forcing, double omega0, int m,
                                  const HarmonicParams& hp);

// Weak (Galerkin) solve of the same problem on the stream-function basis.
VelocityMode solve_forced_harmonic_galerkin(const VelocityMode& forcing, double omega0, int m,
                                            const HarmonicParams& hp);

// (2 i omega0 - L_2)^{-1} B(zeta, zeta). Throws NumericalError when 2 i omega0
// is (close to) an eigenvalue of the n = 2 problem.
ForcedSolve second_harmonic(const VelocityMode& zeta, double omega0, const HarmonicParams& hp);

struct CoefficientCrossChecks {
  cd b_theorem, b_direct;  // b by the projected/collocation route and by the weak-form route
  cd c_theorem, c_direct;
  double b_rel_diff = 0.0;
  double c_rel_diff = 0.0;
  cd dlambda_dnu_fd;       // central difference of the eigenvalue in nu
  double adjoint_rel_diff = 0.0;  // |d_pair - dlambda_dnu_fd| / |d_pair|
  double v20_limit = 0.0;         // v20 at y_max
  double v20_limit_formula = 0.0; // (2/nu0) int s f ds, f the projected zero harmonic of B(zeta, conj zeta)
};

struct HopfReport {
  cd b, c;
  double mu2 = 0.0;
  double omega2 = 0.0;
  double sigma_coeff = 0.0;  // 2 Re(b - c)
  cd d_pair;                 // <(D^2 - alpha^2) zeta, zeta*>
  bool supercritical = false;
  CoefficientCrossChecks cross_checks;
  // Provenance.
  double alpha = 0.0, nu0 = 0.0, omega0 = 0.0, dre_dnu = 0.0;
  std::string profile_name;
  int n_points = 0;
  double y_max = 0.0, stretch = 0.0, eta = 0.0, tol = 0.0;

  std::string verdict() const { return supercritical ? "supercritical" : "subcritical"; }
};

struct CoefficientOptions {
  double consistency_tol = 1e-6;  // allowed relative gap between the two forms of b and of c
  double adjoint_tol = 1e-3;      // allowed gap between d_pair and the finite-difference derivative
  bool finite_difference_check = true;
  int sampled_points = 16;        // x samples for the sampled product route
};

// Intermediate fields of the coefficient computation.
struct HopfFields {
  VelocityMode zeta, zeta_star, w22, v20;
  // Same fields from the Galerkin solves; these match the simulation's
  // discretization and are the better seed for it.
  VelocityMode zeta_weak, w22_weak, v20_weak;
};

enum class FieldRoute { collocation, galerkin };

HopfReport compute_coefficients(const MarginalPoint& mp, const AdjointPair& adj,
                                const CoefficientOptions& opt = {}, HopfFields* fields = nullptr);

// Eigenpair, adjoint and fields recomputed on another grid (typically the
// simulation grid). Consistency limits are not enforced and the
// finite-difference derivative is not recomputed.
HopfReport coefficients_on_grid(const MarginalPoint& mp, const GridPtr& grid, HopfFields& fields);

struct BifurcatedWave {
  double epsilon = 0.0;
  double alpha = 0.0;
  VelocityMode zeta;  // n = 1 profile of V1
  VelocityMode w22;   // n = 2 profile of V2
  VelocityMode v20;   // zero harmonic of V2
  double mu_of_eps = 0.0;
  double omega_of_eps = 0.0;
  std::vector<std::string> warnings;

  // Harmonic n (0..3) of eps V1 + eps^2 V2 in the traveling frame.
  VelocityMode harmonic(int n) const;
  // Physical perturbation velocity at (xi, y_j), j a grid index.
  std::pair<double, double> sample(double xi, int j) const;
};

BifurcatedWave assemble_wave(const HopfReport& report, const HopfFields& fields, double epsilon,
                             FieldRoute route = FieldRoute::collocation);

// Weak-form residual of L_{nu, omega} V + B(V, V) over harmonics 0..3 at the
// assembled wave, for nu = nu0 + mu(eps), omega = omega(eps).
double traveling_wave_residual(const BifurcatedWave& wave, const MarginalPoint& mp);

}  // namespace shearhopf
