#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "shearhopf/grid.hpp"
#include "shearhopf/profile.hpp"

namespace shearhopf {

// Orthonormal basis of nodal stream functions with psi = D psi = 0 at both ends.
struct StreamBasis {
  GridPtr grid;
  Eigen::MatrixXd q;    // nodal values
  Eigen::MatrixXd dq;   // D q
  Eigen::MatrixXd d2q;  // D^2 q
  int dim() const { return static_cast<int>(q.cols()); }
};

std::shared_ptr<const StreamBasis> build_stream_basis(const GridPtr& grid);

// Weak form of the mode-n linearized operator on stream functions psi = Q a.
// For test functions chi = Q c:
//   <grad_perp psi, grad_perp chi>   = -c^H mass a
//   <L grad_perp psi, grad_perp chi> = -c^H stiff a
//   <Lap grad_perp psi, grad_perp chi> = -c^H bilap a
// so eigenpairs satisfy stiff a = lambda mass a.
struct ModeOperator {
  int n = 0;
  double alpha = 0.0;
  double nu = 0.0;
  std::shared_ptr<const StreamBasis> basis;
  Eigen::MatrixXcd mass;
  Eigen::MatrixXcd stiff;
  Eigen::MatrixXcd bilap;

  double k() const { return n * alpha; }
  Eigen::VectorXcd psi(const Eigen::VectorXcd& a) const;
  VelocityMode velocity(const Eigen::VectorXcd& a, double eta) const;
  Eigen::VectorXcd coefficients(const Eigen::VectorXcd& psi_nodal) const;
  // Vector g with <f, grad_perp(Q c)> = c^H g for any velocity field f of this harmonic.
  Eigen::VectorXcd load(const VelocityMode& f) const;
  Eigen::VectorXcd load(const Eigen::VectorXcd& fx, const Eigen::VectorXcd& fy) const;
};

// include_shear = false drops the base-flow terms (pure viscous operator).
ModeOperator build_mode_operator(const std::shared_ptr<const StreamBasis>& basis,
                                 const ShearProfile& profile, double alpha, int n, double nu,
                                 bool include_shear = true);

struct GalerkinEigen {
  cd lambda;
  Eigen::VectorXcd right;  // stiff a = lambda mass a
  Eigen::VectorXcd left;   // stiff^H c = conj(lambda) mass^H c
};

// Inverse iteration at a fixed shift, for both the right and left vectors.
GalerkinEigen galerkin_eigenvector(const ModeOperator& op, cd shift, int iterations = 6);

// All eigenvalues of the discrete pencil.
std::vector<cd> galerkin_spectrum(const ModeOperator& op);

}  // namespace shearhopf
