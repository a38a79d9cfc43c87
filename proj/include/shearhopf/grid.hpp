#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <vector>

namespace shearhopf {

using cd = std::complex<double>;

// Chebyshev-Gauss-Lobatto nodes on [0, y_max] under the algebraic map
// y = a(1+x)/(b-x). The stretch s puts the median node at y_max/(2s);
// the wall spacing is then (2s-1)^2 times finer than the spacing at y_max.
struct HalfLineGrid {
  int n_points = 0;
  double y_max = 0.0;
  double stretch = 1.0;
  double map_a = 0.0;
  double map_b = 0.0;
  Eigen::VectorXd nodes;    // increasing, nodes[0] = 0, nodes[last] = y_max
  Eigen::VectorXd xi;       // Chebyshev coordinate of each node
  Eigen::VectorXd weights;  // Clenshaw-Curtis weights mapped to y
  Eigen::MatrixXd d1;       // d/dy
  Eigen::MatrixXd d2;       // d^2/dy^2
  Eigen::MatrixXd integ;    // (integ f)_i = int_0^{y_i} f dy for the interpolant
  std::vector<std::string> warnings;
};

using GridPtr = std::shared_ptr<const HalfLineGrid>;

inline constexpr double kMinStretch = 1.5;

GridPtr build_grid(double y_max, int n_points, double stretch);

// Stretch that puts the median node at y_half.
double stretch_for_median(double y_max, double y_half);

struct GridSpec {
  int n_points = 225;
  double y_half = 0.4;  // median node
  double y_max = 0.0;   // 0 selects 25 / eta
};

// Grid for a decay weight eta.
GridPtr build_grid(const GridSpec& spec, double eta);

// Simulation grid: fewer points, median node further out so that the zero
// mode's long diffusive tail stays resolved.
inline GridSpec simulation_grid_spec() { return GridSpec{128, 2.0, 0.0}; }

// Complex profile in y tagged with its x-harmonic n and decay weight eta.
struct ModeFunction {
  int n = 0;
  double eta = 0.0;
  GridPtr grid;
  Eigen::VectorXcd values;

  static ModeFunction zeros(const GridPtr& g, int n, double eta);
  // Weighted sup-norm sup |f| e^{eta y} over the grid.
  double weighted_sup() const;
  // True when the outer 10% of nodes shows no growth of |f| e^{eta y}.
  bool decays(double tol = 1e-8) const;
};

// Velocity (vx, vy) of one harmonic e^{i n alpha x}.
struct VelocityMode {
  ModeFunction vx;
  ModeFunction vy;
  double alpha = 0.0;
  bool solenoidal = false;
  bool no_slip = false;

  int n() const { return vx.n; }
  const GridPtr& grid() const { return vx.grid; }
  static VelocityMode zeros(const GridPtr& g, int n, double alpha, double eta);
  // Max over nodes of |i n alpha vx + D vy|.
  double divergence_sup() const;
  VelocityMode conj() const;  // the harmonic -n carrying the complex conjugate
  VelocityMode scaled(cd s) const;
};

ModeFunction derivative(const ModeFunction& f, int order);

// Sesquilinear pairing int (ux conj(vx) + uy conj(vy)) dy by grid quadrature.
cd weighted_inner(const VelocityMode& u, const VelocityMode& v);

// sqrt of weighted_inner(u, u).
double l2_norm(const VelocityMode& u);

}  // namespace shearhopf
