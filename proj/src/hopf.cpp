#include "shearhopf/hopf.hpp"

#include <cmath>
#include <limits>

#include "shearhopf/errors.hpp"
#include "shearhopf/galerkin.hpp"

namespace shearhopf {

namespace {

Eigen::VectorXcd curl(const VelocityMode& f) {
  const double k = f.n() * f.alpha;
  return cd(0.0, k) * f.vy.values - f.grid()->d1 * f.vx.values;
}

VelocityMode stream_velocity(const GridPtr& g, const Eigen::VectorXcd& psi, int n, double alpha, double eta) {
  VelocityMode w = VelocityMode::zeros(g, n, alpha, eta);
  w.vx.values = -(g->d1 * psi);
  w.vy.values = cd(0.0, n * alpha) * psi;
  w.vx.values(0) = 0.0;
  w.vy.values(0) = 0.0;
  w.solenoidal = true;
  w.no_slip = true;
  return w;
}

// Vector (D^2 - alpha^2 n^2) applied componentwise.
VelocityMode vector_laplacian(const VelocityMode& v) {
  const double k = v.n() * v.alpha;
  VelocityMode r = v;
  r.vx.values = v.grid()->d2 * v.vx.values - k * k * v.vx.values;
  r.vy.values = v.grid()->d2 * v.vy.values - k * k * v.vy.values;
  return r;
}

double rel_diff(cd a, cd b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m > 0.0 ? std::abs(a - b) / m : 0.0;
}

}  // namespace

ForcedSolve solve_forced_harmonic(const VelocityMode& forcing, double omega0, int m,
                                  const HarmonicParams& hp) {
  if (m == 0) throw InvalidParameter("solve_forced_harmonic: harmonic must be nonzero");
  const GridPtr& gp = forcing.grid();
  const HalfLineGrid& g = *gp;
  const int np = g.n_points;
  const double k = m * hp.alpha;
  const double nu = hp.nu;
  const cd ik(0.0, k), shift(0.0, m * omega0);

  Eigen::VectorXd u(np), upp(np);
  for (int j = 0; j < np; ++j) {
    u(j) = hp.profile.u(g.nodes(j));
    upp(j) = hp.profile.d2u(g.nodes(j));
  }
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(np, np);
  const Eigen::MatrixXcd l2 = g.d2.cast<cd>() - k * k * id;

  // Unknowns [psi; Omega]. Rows: Omega = L2 psi, then the curl equation
  // i m omega0 Omega - nu L2 Omega + i k U Omega - i k U'' psi = curl F.
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2 * np, 2 * np);
  a.topLeftCorner(np, np) = l2;
  a.topRightCorner(np, np) = -id;
  a.bottomRightCorner(np, np) = shift * id - nu * l2;
  for (int j = 0; j < np; ++j) {
    a(np + j, np + j) += ik * u(j);
    a(np + j, j) = -ik * upp(j);
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(2 * np);
  rhs.tail(np) = curl(forcing);
  // Wall and far-field conditions replace the end rows of each block.
  for (int r : {0, np - 1}) {
    a.row(r).setZero();
    a(r, r) = 1.0;
    rhs(r) = 0.0;
    a.row(np + r).setZero();
    a.block(np + r, 0, 1, np) = g.d1.row(r).cast<cd>();
    rhs(np + r) = 0.0;
  }
  // Row scaling keeps the condition estimate meaningful.
  for (int r = 0; r < 2 * np; ++r) {
    double s = a.row(r).cwiseAbs().maxCoeff();
    a.row(r) /= s;
    rhs(r) /= s;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  ForcedSolve out;
  out.rcond = lu.rcond();
  if (!(out.rcond * hp.cond_limit > 1.0))
    throw NumericalError("solve_forced_harmonic: collocation matrix is ill-conditioned (resonant harmonic)");
  Eigen::VectorXcd x = lu.solve(rhs);
  const double bn = rhs.norm();
  out.residual = bn > 0.0 ? (a * x - rhs).norm() / bn : (a * x).norm();
  out.psi = x.head(np);
  out.omega = x.tail(np);
  out.w = stream_velocity(gp, out.psi, m, hp.alpha, hp.eta);
  return out;
}

VelocityMode solve_forced_harmonic_galerkin(const VelocityMode& forcing, double omega0, int m,
                                            const HarmonicParams& hp) {
  auto basis = build_stream_basis(forcing.grid());
  ModeOperator op = build_mode_operator(basis, hp.profile, hp.alpha, m, hp.nu);
  Eigen::MatrixXcd a = cd(0.0, m * omega0) * op.mass - op.stiff;
  Eigen::VectorXcd g = op.load(forcing);
  Eigen::VectorXcd coef = a.partialPivLu().solve(-g);
  return op.velocity(coef, hp.eta);
}

ForcedSolve second_harmonic(const VelocityMode& zeta, double omega0, const HarmonicParams& hp) {
  if (hp.check_resonance) {
    OSParams p2;
    p2.alpha = hp.alpha;
    p2.n = 2;
    p2.nu = hp.nu;
    p2.profile = hp.profile;
    p2.eta = hp.eta;
    const cd center(0.0, 2.0 * omega0);
    const double r = 0.05 * std::abs(omega0);
    if (count_in_contour(p2, circle_contour(center, r, 16), ContourCheck::admissible) != 0)
      throw NumericalError("second_harmonic: 2 i omega0 is close to an eigenvalue of the n = 2 problem");
  }
  VelocityMode f = bilinear_B(zeta, zeta);
  return solve_forced_harmonic(f, omega0, 2, hp);
}

HopfReport compute_coefficients(const MarginalPoint& mp, const AdjointPair& adj,
                                const CoefficientOptions& opt, HopfFields* fields) {
  const OSParams& p = mp.params;
  const double nu0 = mp.nu0, alpha = mp.alpha, omega0 = mp.omega0;
  if (std::abs(adj.normalization - 1.0) > 1e-8)
    throw InvalidParameter("compute_coefficients: adjoint not normalized");

  VelocityMode zeta = eigenfunction_velocity(mp.eigen, p);
  const VelocityMode& zs = adj.zeta_star;
  VelocityMode zbar = zeta.conj();
  HarmonicParams hp;
  hp.alpha = alpha;
  hp.nu = nu0;
  hp.profile = p.profile;
  hp.eta = p.eta;

  HopfReport rep;
  rep.alpha = alpha;
  rep.nu0 = nu0;
  rep.omega0 = omega0;
  rep.dre_dnu = mp.dre_dnu;
  rep.profile_name = p.profile.name;
  rep.n_points = p.grid->n_points;
  rep.y_max = p.grid->y_max;
  rep.stretch = p.grid->stretch;
  rep.eta = p.eta;
  rep.tol = p.tol;

  // Projected route: sampled products, explicit projection, closed-form
  // zero-mode inverse, collocated second harmonic.
  VelocityMode f0 = project_zero_mode(advection_product_sampled(zeta, zbar, opt.sampled_points));
  VelocityMode v20 = l0_inverse(f0.vx, nu0, alpha).scaled(-2.0);
  ForcedSolve w22s = second_harmonic(zeta, omega0, hp);
  const VelocityMode& w22 = w22s.w;
  cd c_thm = -2.0 * weighted_inner(helmholtz_project(advection_product_sampled(zeta, v20, opt.sampled_points)), zs);
  cd b_thm = 2.0 * weighted_inner(helmholtz_project(advection_product_sampled(zbar, w22, opt.sampled_points)), zs);

  // Weak-form route: modal products paired with the solenoidal adjoint,
  // Galerkin zero-mode inverse and second harmonic.
  VelocityMode f0d = advection_product(zeta, zbar);
  VelocityMode u0 = l0_inverse_galerkin(f0d.vx, nu0, alpha);
  cd c_dir = 4.0 * weighted_inner(advection_product(zeta, u0), zs);
  VelocityMode w22d = solve_forced_harmonic_galerkin(advection_product(zeta, zeta), omega0, 2, hp);
  cd b_dir = 2.0 * weighted_inner(advection_product(zbar, w22d), zs);

  auto& cc = rep.cross_checks;
  cc.b_theorem = b_thm;
  cc.b_direct = b_dir;
  cc.c_theorem = c_thm;
  cc.c_direct = c_dir;
  cc.b_rel_diff = rel_diff(b_thm, b_dir);
  cc.c_rel_diff = rel_diff(c_thm, c_dir);

  const Eigen::VectorXd& w = p.grid->weights;
  const Eigen::VectorXd& y = p.grid->nodes;
  double lim = 0.0;
  for (int j = 0; j < y.size(); ++j) lim += w(j) * y(j) * f0.vx.values(j).real();
  cc.v20_limit = v20.vx.values(y.size() - 1).real();
  cc.v20_limit_formula = 2.0 * lim / nu0;

  rep.b = b_dir;
  rep.c = c_dir;
  rep.d_pair = weighted_inner(vector_laplacian(zeta), zs);

  if (opt.finite_difference_check) {
    cd dl = mp.dlambda_dnu;
    cc.dlambda_dnu_fd = dl;
    cc.adjoint_rel_diff = std::abs(rep.d_pair - dl) / std::abs(rep.d_pair);
  }

  const cd cmb = rep.c - rep.b;
  rep.mu2 = cmb.real() / rep.d_pair.real();
  rep.omega2 = -cmb.imag() + rep.mu2 * rep.d_pair.imag();
  rep.sigma_coeff = 2.0 * (rep.b - rep.c).real();
  rep.supercritical = rep.mu2 > 0.0;

  if (fields) {
    fields->zeta = zeta;
    fields->zeta_star = zs;
    fields->w22 = w22;
    fields->v20 = v20;
    Eigenpair raw = mp.eigen;
    raw.psi = raw.psi_galerkin.grid ? raw.psi_galerkin : raw.psi;
    fields->zeta_weak = eigenfunction_velocity(raw, p);
    fields->w22_weak = w22d;
    fields->v20_weak = u0.scaled(-2.0);
  }
  if (cc.b_rel_diff > opt.consistency_tol)
    throw ConsistencyError("compute_coefficients: the two forms of b differ by " + std::to_string(cc.b_rel_diff));
  if (cc.c_rel_diff > opt.consistency_tol)
    throw ConsistencyError("compute_coefficients: the two forms of c differ by " + std::to_string(cc.c_rel_diff));
  if (opt.finite_difference_check && cc.adjoint_rel_diff > opt.adjoint_tol)
    throw ConsistencyError("compute_coefficients: <Lap zeta, zeta*> differs from d lambda/d nu by " +
                           std::to_string(cc.adjoint_rel_diff));
  if (!(rep.d_pair.real() > 0.0))
    throw ConsistencyError("compute_coefficients: Re <(D^2 - alpha^2) zeta, zeta*> is not positive");
  return rep;
}

VelocityMode BifurcatedWave::harmonic(int n) const {
  const double e = epsilon, e2 = epsilon * epsilon;
  switch (n) {
    case 0: return v20.scaled(e2);
    case 1: return zeta.scaled(e);
    case 2: return w22.scaled(e2);
    case -1: return zeta.conj().scaled(e);
    case -2: return w22.conj().scaled(e2);
    default: {
      VelocityMode z = VelocityMode::zeros(zeta.grid(), n, alpha, zeta.vx.eta);
      z.solenoidal = z.no_slip = true;
      return z;
    }
  }
}

HopfReport coefficients_on_grid(const MarginalPoint& mp, const GridPtr& grid, HopfFields& fields) {
  MarginalPoint m = mp;
  m.params.grid = grid;
  m.eigen = eigen_search(m.params, mp.eigen.lambda);
  const AdjointPair adj = adjoint_eigenfunction(m.eigen, m.params);
  CoefficientOptions o;
  o.consistency_tol = std::numeric_limits<double>::infinity();
  o.adjoint_tol = std::numeric_limits<double>::infinity();
  o.finite_difference_check = false;
  return compute_coefficients(m, adj, o, &fields);
}

std::pair<double, double> BifurcatedWave::sample(double xi, int j) const {
  const cd e1 = std::polar(1.0, alpha * xi), e2 = std::polar(1.0, 2.0 * alpha * xi);
  const double eps2 = epsilon * epsilon;
  double vx = 2.0 * epsilon * (zeta.vx.values(j) * e1).real() +
              eps2 * (2.0 * (w22.vx.values(j) * e2).real() + v20.vx.values(j).real());
  double vy = 2.0 * epsilon * (zeta.vy.values(j) * e1).real() + eps2 * 2.0 * (w22.vy.values(j) * e2).real();
  return {vx, vy};
}

BifurcatedWave assemble_wave(const HopfReport& report, const HopfFields& fields, double epsilon,
                             FieldRoute route) {
  BifurcatedWave wv;
  wv.epsilon = epsilon;
  wv.alpha = report.alpha;
  const bool weak = route == FieldRoute::galerkin;
  wv.zeta = weak && fields.zeta_weak.grid() ? fields.zeta_weak : fields.zeta;
  wv.w22 = weak ? fields.w22_weak : fields.w22;
  wv.v20 = weak ? fields.v20_weak : fields.v20;
  wv.mu_of_eps = epsilon * epsilon * report.mu2;
  wv.omega_of_eps = report.omega0 + epsilon * epsilon * report.omega2;
  if (std::abs(wv.mu_of_eps) > 0.1 * report.nu0)
    wv.warnings.push_back("nu shift exceeds 10% of nu0; the truncated expansion is unreliable");
  return wv;
}

double traveling_wave_residual(const BifurcatedWave& wave, const MarginalPoint& mp) {
  const OSParams& p = mp.params;
  const double nu = mp.nu0 + wave.mu_of_eps;
  const double omega = wave.omega_of_eps;
  auto basis = build_stream_basis(p.grid);
  const HalfLineGrid& g = *p.grid;
  double total = 0.0;
  for (int n = 0; n <= 3; ++n) {
    // Quadratic term -(V.grad)V on harmonic n as a sum over ordered pairs.
    VelocityMode q = VelocityMode::zeros(p.grid, n, wave.alpha, p.eta);
    for (int a = -2; a <= 2; ++a) {
      int b = n - a;
      if (b < -2 || b > 2) continue;
      VelocityMode prod = advection_product(wave.harmonic(a), wave.harmonic(b));
      q.vx.values += prod.vx.values;
      q.vy.values += prod.vy.values;
    }
    if (n == 0) {
      const int m = g.n_points - 1;
      Eigen::MatrixXd kk = g.d1.transpose() * g.weights.asDiagonal() * g.d1;
      Eigen::VectorXcd v0 = wave.harmonic(0).vx.values;
      Eigen::VectorXcd r = -nu * (kk.cast<cd>() * v0) + g.weights.cast<cd>().cwiseProduct(q.vx.values);
      total += r.tail(m).squaredNorm();
      continue;
    }
    ModeOperator op = build_mode_operator(basis, p.profile, wave.alpha, n, nu);
    VelocityMode vn = wave.harmonic(n);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(g.n_points);
    if (n <= 2) psi = vn.vy.values / cd(0.0, n * wave.alpha);
    Eigen::VectorXcd a = op.coefficients(psi);
    Eigen::VectorXcd r = -(op.stiff - cd(0.0, n * omega) * op.mass) * a + op.load(q);
    total += r.squaredNorm();
  }
  return std::sqrt(total);
}

}  // namespace shearhopf
