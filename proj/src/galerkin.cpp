#include "shearhopf/galerkin.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "shearhopf/errors.hpp"

namespace shearhopf {

std::shared_ptr<const StreamBasis> build_stream_basis(const GridPtr& grid) {
  const int np = grid->n_points;
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(np, 4);
  c(0, 0) = 1.0;
  c(np - 1, 1) = 1.0;
  c.col(2) = grid->d1.row(0).transpose();
  c.col(3) = grid->d1.row(np - 1).transpose();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
  Eigen::MatrixXd full = qr.householderQ();
  auto b = std::make_shared<StreamBasis>();
  b->grid = grid;
  b->q = full.rightCols(np - 4);
  b->dq = grid->d1 * b->q;
  b->d2q = grid->d2 * b->q;
  return b;
}

ModeOperator build_mode_operator(const std::shared_ptr<const StreamBasis>& basis,
                                 const ShearProfile& profile, double alpha, int n, double nu,
                                 bool include_shear) {
  ModeOperator op;
  op.n = n;
  op.alpha = alpha;
  op.nu = nu;
  op.basis = basis;
  const double k = n * alpha;
  const auto& g = *basis->grid;
  const Eigen::MatrixXd& q = basis->q;
  const Eigen::MatrixXd& dq = basis->dq;
  Eigen::MatrixXd l2q = basis->d2q - k * k * q;
  const Eigen::VectorXd& w = g.weights;

  Eigen::MatrixXd wq = w.asDiagonal() * q;
  Eigen::MatrixXd mass = -(dq.transpose() * w.asDiagonal() * dq + k * k * (q.transpose() * wq));
  Eigen::MatrixXd bilap = l2q.transpose() * w.asDiagonal() * l2q;
  op.mass = mass.cast<cd>();
  op.bilap = bilap.cast<cd>();
  op.stiff = (nu * bilap).cast<cd>();
  if (include_shear && n != 0) {
    Eigen::VectorXd u(g.n_points), upp(g.n_points);
    for (int j = 0; j < g.n_points; ++j) {
      u(j) = profile.u(g.nodes(j));
      upp(j) = profile.d2u(g.nodes(j));
    }
    Eigen::MatrixXd adv = wq.transpose() * u.asDiagonal() * l2q;
    Eigen::MatrixXd curv = wq.transpose() * upp.asDiagonal() * q;
    op.stiff += cd(0.0, -k) * adv.cast<cd>() + cd(0.0, k) * curv.cast<cd>();
  }
  return op;
}

Eigen::VectorXcd ModeOperator::psi(const Eigen::VectorXcd& a) const {
  return basis->q.cast<cd>() * a;
}

VelocityMode ModeOperator::velocity(const Eigen::VectorXcd& a, double eta) const {
  VelocityMode v = VelocityMode::zeros(basis->grid, n, alpha, eta);
  v.vx.values = -(basis->dq.cast<cd>() * a);
  v.vy.values = cd(0.0, k()) * (basis->q.cast<cd>() * a);
  v.vx.values(0) = 0.0;
  v.vy.values(0) = 0.0;
  v.solenoidal = true;
  v.no_slip = true;
  return v;
}

Eigen::VectorXcd ModeOperator::coefficients(const Eigen::VectorXcd& psi_nodal) const {
  return basis->q.transpose().cast<cd>() * psi_nodal;
}

Eigen::VectorXcd ModeOperator::load(const Eigen::VectorXcd& fx, const Eigen::VectorXcd& fy) const {
  const Eigen::VectorXd& w = basis->grid->weights;
  Eigen::VectorXcd wfx = w.cast<cd>().cwiseProduct(fx);
  Eigen::VectorXcd wfy = w.cast<cd>().cwiseProduct(fy);
  return -(basis->dq.transpose().cast<cd>() * wfx) - cd(0.0, k()) * (basis->q.transpose().cast<cd>() * wfy);
}

Eigen::VectorXcd ModeOperator::load(const VelocityMode& f) const {
  return load(f.vx.values, f.vy.values);
}

GalerkinEigen galerkin_eigenvector(const ModeOperator& op, cd shift, int iterations) {
  const Eigen::MatrixXcd a = op.stiff - shift * op.mass;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu_h(a.adjoint());
  const int m = static_cast<int>(op.mass.rows());
  // Deterministic start vectors.
  Eigen::VectorXcd x(m), y(m);
  for (int i = 0; i < m; ++i) {
    x(i) = cd(1.0 + 0.1 * std::sin(1.0 + i), 0.3 * std::cos(2.0 * i));
    y(i) = cd(1.0 + 0.1 * std::cos(0.5 + i), -0.2 * std::sin(3.0 * i));
  }
  for (int it = 0; it < iterations; ++it) {
    x = lu.solve(op.mass * x);
    x /= x.norm();
    y = lu_h.solve(op.mass.adjoint() * y);
    y /= y.norm();
  }
  GalerkinEigen r;
  r.right = x;
  r.left = y;
  cd num = y.dot(op.stiff * x);  // y^H stiff x
  cd den = y.dot(op.mass * x);
  if (std::abs(den) < 1e-14) throw NumericalError("galerkin_eigenvector: left and right vectors are orthogonal (defective eigenvalue)");
  r.lambda = num / den;
  return r;
}

std::vector<cd> galerkin_spectrum(const ModeOperator& op) {
  Eigen::MatrixXcd m = op.mass.partialPivLu().solve(op.stiff);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  if (es.info() != Eigen::Success) throw NumericalError("galerkin_spectrum: eigensolver failed");
  std::vector<cd> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

}  // namespace shearhopf
