#include "shearhopf/orr_sommerfeld.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shearhopf/galerkin.hpp"
#include "shearhopf/ode.hpp"

namespace shearhopf {

double OSParams::march_start() const {
  double far = y_far > 0.0 ? y_far : 40.0 / profile.gamma;
  if (grid) far = std::min(far, grid->y_max);
  return far;
}

RegionParams OSParams::region() const {
  RegionParams rp;
  rp.nu = nu;
  rp.alpha = alpha;
  rp.eta = eta;
  rp.u_plus = profile.u_plus;
  return rp;
}

void OSParams::validate() const {
  if (!(nu > 0.0)) throw InvalidParameter("OSParams: nu must be positive");
  if (!(alpha > 0.0)) throw InvalidParameter("OSParams: alpha must be positive");
  if (n == 0) throw InvalidParameter("OSParams: harmonic index must be nonzero");
  if (!(eta > 0.0) || !(eta < std::min(alpha / 2.0, profile.gamma)))
    throw InvalidParameter("OSParams: need 0 < eta < min(alpha/2, gamma)");
  if (!profile.u) throw InvalidParameter("OSParams: profile not set");
}

cd far_field_root(const OSParams& p, cd lambda) {
  const double k = p.k();
  cd s2 = k * k + (lambda + cd(0.0, k * p.profile.u_plus)) / p.nu;
  cd s = std::sqrt(s2);
  if (s.real() < 0.0) s = -s;
  return s;
}

namespace {

// Minors (12, 13, 14, 23, 24, 34) of the decaying pair e^{-kappa y}, e^{-s y},
// and their derivatives with respect to s.
void far_minors(cd kap, cd s, Eigen::VectorXcd& m, Eigen::VectorXcd& dm_ds) {
  m.resize(6);
  dm_ds.resize(6);
  m << kap - s, s * s - kap * kap, kap * kap * kap - s * s * s, kap * s * (kap - s),
      kap * s * (s * s - kap * kap), kap * kap * s * s * (kap - s);
  dm_ds << -1.0, 2.0 * s, -3.0 * s * s, kap * (kap - 2.0 * s), 3.0 * kap * s * s - kap * kap * kap,
      2.0 * kap * kap * kap * s - 3.0 * kap * kap * s * s;
}

inline void minor_rhs(cd pc, cd qc, cd shift, const cd* z, cd* dz) {
  dz[0] = z[1] + shift * z[0];
  dz[1] = z[2] + z[3] + shift * z[1];
  dz[2] = pc * z[1] + z[4] + shift * z[2];
  dz[3] = z[4] + shift * z[3];
  dz[4] = -qc * z[0] + pc * z[3] + z[5] + shift * z[4];
  dz[5] = -qc * z[1] + shift * z[5];
}

}  // namespace

DispersionValue dispersion_full(const OSParams& p, cd lambda, bool with_derivative) {
  const double k = p.k();
  const double kap = std::abs(k);
  const double nu = p.nu;
  DispersionValue out;
  cd s = far_field_root(p, lambda);
  out.s = s;
  if (std::abs(s - kap) < 1e-8 * (std::abs(s) + kap))
    throw NumericalError("dispersion: degenerate far field (s equals the potential decay rate)");

  Eigen::VectorXcd m0, dm0;
  far_minors(kap, s, m0, dm0);
  const cd shift = kap + s;
  const cd ds = 1.0 / (2.0 * s * nu);
  const cd ik(0.0, k);
  const auto& prof = p.profile;

  OdeRhs rhs;
  Eigen::VectorXcd z0;
  if (!with_derivative) {
    z0 = m0;
    rhs = [&](double y, const Eigen::VectorXcd& z, Eigen::VectorXcd& dz) {
      const double u = prof.u(y), upp = prof.d2u(y);
      const cd lam_u = lambda + ik * u;
      const cd pc = 2.0 * k * k + lam_u / nu;
      const cd qc = -k * k * k * k - (lam_u * k * k + ik * upp) / nu;
      minor_rhs(pc, qc, shift, z.data(), dz.data());
    };
  } else {
    z0.resize(12);
    z0.head(6) = m0;
    z0.tail(6) = dm0 * ds;
    rhs = [&](double y, const Eigen::VectorXcd& z, Eigen::VectorXcd& dz) {
      const double u = prof.u(y), upp = prof.d2u(y);
      const cd lam_u = lambda + ik * u;
      const cd pc = 2.0 * k * k + lam_u / nu;
      const cd qc = -k * k * k * k - (lam_u * k * k + ik * upp) / nu;
      minor_rhs(pc, qc, shift, z.data(), dz.data());
      // Sensitivity: d/dlambda of the same system.
      cd tmp[6];
      minor_rhs(pc, qc, shift, z.data() + 6, tmp);
      const cd dp = 1.0 / nu, dq = -k * k / nu;
      dz[6] = tmp[0] + ds * z[0];
      dz[7] = tmp[1] + ds * z[1];
      dz[8] = tmp[2] + dp * z[1] + ds * z[2];
      dz[9] = tmp[3] + ds * z[3];
      dz[10] = tmp[4] - dq * z[0] + dp * z[3] + ds * z[4];
      dz[11] = tmp[5] - dq * z[1] + ds * z[5];
    };
  }
  OdeResult r = integrate_ode(rhs, p.march_start(), 0.0, z0, p.tol);
  out.value = r.state(0);
  out.derivative = with_derivative ? r.state(6) : cd(0.0);
  out.steps = r.steps;
  return out;
}

cd dispersion(const OSParams& p, cd lambda) { return dispersion_full(p, lambda, false).value; }

namespace {

ModeFunction normalized_psi(const Eigen::VectorXcd& nodal, const OSParams& p) {
  ModeFunction f = ModeFunction::zeros(p.grid, p.n, p.eta);
  Eigen::Index imax = 0;
  nodal.cwiseAbs().maxCoeff(&imax);
  cd ref = nodal(imax);
  f.values = nodal / ref;
  f.values(0) = 0.0;
  f.values(f.values.size() - 1) = 0.0;
  return f;
}

// Once U has reached U+ to rounding and the viscous root has died out the
// solution is c e^{-|k| y}. The discrete vector only resolves it down to about
// 1e-9 on the coarse far-field nodes, which the decay weight would amplify.
// The wall slope is then restored through the first interior node.
ModeFunction with_far_field_tail(ModeFunction f, const OSParams& p, cd s) {
  const int np = static_cast<int>(f.values.size());
  const Eigen::VectorXd& y = p.grid->nodes;
  const double k = std::abs(p.k());
  for (int j = 1; j < np - 1; ++j) {
    const double dev = std::abs(p.profile.u(y(j)) - p.profile.u_plus) + std::abs(p.profile.du(y(j)));
    if (dev > 1e-16 * std::max(std::abs(p.profile.u_plus), 1.0) || s.real() * y(j) < 40.0) continue;
    for (int i = j + 1; i < np - 1; ++i) f.values(i) = f.values(j) * std::exp(-k * (y(i) - y(j)));
    const Eigen::MatrixXd& d1 = p.grid->d1;
    f.values(1) -= d1.row(0).cast<cd>().dot(f.values) / d1(0, 1);
    break;
  }
  return f;
}

}  // namespace

Eigenpair eigen_search(const OSParams& p, cd lambda0, const SearchOptions& opt) {
  p.validate();
  cd lam = lambda0;
  int it = 0;
  bool converged = false;
  double last_step = 0.0;
  for (; it < opt.max_iter; ++it) {
    DispersionValue dv = dispersion_full(p, lam, true);
    if (dv.value == 0.0) {
      converged = true;
      break;
    }
    if (dv.derivative == 0.0) throw NumericalError("eigen_search: vanishing derivative");
    cd step = dv.value / dv.derivative;
    const double cap = 0.25 * std::max(std::abs(lam), 1e-2);
    if (std::abs(step) > cap) step *= cap / std::abs(step);
    lam -= step;
    last_step = std::abs(step);
    if (last_step <= opt.step_tol * std::max(std::abs(lam), 1e-3)) {
      converged = true;
      ++it;
      break;
    }
  }
  if (!converged) {
    throw NumericalError("eigen_search: no convergence after " + std::to_string(opt.max_iter) +
                         " iterations; last iterate " + std::to_string(lam.real()) + " " +
                         std::to_string(lam.imag()) + "i, last step " + std::to_string(last_step));
  }
  Eigenpair e;
  e.lambda = lam;
  e.iterations = it;
  e.s = far_field_root(p, lam);
  e.in_region = in_sigma_uplus(lam, p.region());
  if (opt.reject_essential && e.s.real() <= p.eta)
    throw EssentialSpectrumHit("eigen_search: converged onto the essential spectrum (Re s <= eta)", lam);
  cd d_here = dispersion(p, lam);
  cd d_off = dispersion(p, lam + 0.1);
  e.residual = std::abs(d_here) / std::max(std::abs(d_off), 1e-300);
  if (p.grid) {
    auto basis = build_stream_basis(p.grid);
    ModeOperator op = build_mode_operator(basis, p.profile, p.alpha, p.n, p.nu);
    GalerkinEigen ge = galerkin_eigenvector(op, lam, 4);
    e.galerkin_lambda = ge.lambda;
    e.psi_galerkin = normalized_psi(op.psi(ge.right), p);
    e.psi = with_far_field_tail(e.psi_galerkin, p, e.s);
  }
  return e;
}

int count_in_contour(const OSParams& p, const Contour& contour, ContourCheck check) {
  p.validate();
  const auto& v = contour.vertices;
  if (v.size() < 3) throw InvalidParameter("count_in_contour: contour needs at least three vertices");
  const RegionParams rp = p.region();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const cd a = v[i], b = v[(i + 1) % v.size()];
    for (int j = 0; j <= 16; ++j) {
      const cd z = a + (b - a) * (j / 16.0);
      const bool bad = check == ContourCheck::region ? in_sigma_uplus(z, rp)
                                                     : far_field_root(p, z).real() <= p.eta;
      if (bad) throw InvalidParameter("count_in_contour: contour meets the essential spectrum");
    }
  }

  const double max_jump = std::numbers::pi / 4.0;
  double total = 0.0;
  std::function<void(cd, cd, cd, cd, int)> refine = [&](cd a, cd b, cd da, cd db, int depth) {
    double dphi = std::arg(db / da);
    if (std::abs(dphi) <= max_jump) {
      total += dphi;
      return;
    }
    if (depth > 24) throw NumericalError("count_in_contour: phase not resolved (zero on or near the contour)");
    cd mid = 0.5 * (a + b);
    cd dm = dispersion(p, mid);
    refine(a, mid, da, dm, depth + 1);
    refine(mid, b, dm, db, depth + 1);
  };
  std::vector<cd> dv(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dv[i] = dispersion(p, v[i]);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const cd a = v[i], b = v[(i + 1) % v.size()];
    const cd da = dv[i], db = dv[(i + 1) % v.size()];
    const int sub = 4;
    cd prev = a, dprev = da;
    for (int j = 1; j <= sub; ++j) {
      cd pt = (j == sub) ? b : a + (b - a) * (double(j) / sub);
      cd dpt = (j == sub) ? db : dispersion(p, pt);
      refine(prev, pt, dprev, dpt, 0);
      prev = pt;
      dprev = dpt;
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

VelocityMode eigenfunction_velocity(const Eigenpair& e, const OSParams& p) {
  const ModeFunction& psi = e.psi;
  if (!psi.grid) throw InvalidParameter("eigenfunction_velocity: eigenpair has no eigenfunction");
  VelocityMode v = VelocityMode::zeros(psi.grid, p.n, p.alpha, p.eta);
  v.vx.values = -(psi.grid->d1 * psi.values);
  v.vy.values = cd(0.0, p.k()) * psi.values;
  v.vx.values(0) = 0.0;
  v.vy.values(0) = 0.0;
  v.solenoidal = true;
  v.no_slip = true;
  return v;
}

AdjointPair adjoint_eigenfunction(const Eigenpair& e, const OSParams& p, bool check_simple) {
  p.validate();
  if (!p.grid) throw InvalidParameter("adjoint_eigenfunction: grid required");
  if (check_simple) {
    const double r = 0.02 * std::max(std::abs(e.lambda), 1e-3);
    int cnt = count_in_contour(p, circle_contour(e.lambda, r, 16), ContourCheck::admissible);
    if (cnt != 1) throw NumericalError("adjoint_eigenfunction: eigenvalue is not simple (count " + std::to_string(cnt) + ")");
  }
  auto basis = build_stream_basis(p.grid);
  ModeOperator op = build_mode_operator(basis, p.profile, p.alpha, p.n, p.nu);
  GalerkinEigen ge = galerkin_eigenvector(op, e.lambda, 4);
  Eigen::VectorXcd a = op.coefficients(e.psi.values);
  AdjointPair ap;
  ap.galerkin_lambda = ge.lambda;
  ap.zeta_star = op.velocity(ge.left, p.eta);
  VelocityMode zeta = eigenfunction_velocity(e, p);
  cd pair = weighted_inner(zeta, ap.zeta_star);
  if (std::abs(pair) < 1e-12 * l2_norm(zeta) * l2_norm(ap.zeta_star))
    throw NumericalError("adjoint_eigenfunction: eigenvector and adjoint are orthogonal (multiple eigenvalue)");
  ap.zeta_star = ap.zeta_star.scaled(std::conj(1.0 / pair));
  ap.normalization = weighted_inner(zeta, ap.zeta_star);
  (void)a;
  return ap;
}

std::vector<cd> multi_seed_scan(const OSParams& p, double re_lo, double re_hi, double im_lo,
                                double im_hi, int seeds_re, int seeds_im) {
  std::vector<cd> roots;
  SearchOptions opt;
  opt.max_iter = 40;
  for (int i = 0; i < seeds_re; ++i) {
    for (int j = 0; j < seeds_im; ++j) {
      double re = re_lo + (re_hi - re_lo) * (seeds_re == 1 ? 0.5 : double(i) / (seeds_re - 1));
      double im = im_lo + (im_hi - im_lo) * (seeds_im == 1 ? 0.5 : double(j) / (seeds_im - 1));
      try {
        Eigenpair e = eigen_search([&] { OSParams q = p; q.grid = nullptr; return q; }(), cd(re, im), opt);
        if (e.in_region) continue;
        bool dup = false;
        for (const cd& r : roots)
          if (std::abs(r - e.lambda) <= 1e-7 * std::max(std::abs(r), 1e-3)) dup = true;
        if (!dup) roots.push_back(e.lambda);
      } catch (const NumericalError&) {
      }
    }
  }
  std::sort(roots.begin(), roots.end(), [](cd a, cd b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  return roots;
}

std::vector<cd> multi_seed_scan(const OSParams& p, int seeds_re, int seeds_im) {
  const double k = std::abs(p.k());
  return multi_seed_scan(p, -2.0 * p.nu * p.alpha * p.alpha, 0.5,
                         -2.0 * k * p.profile.u_plus, 0.0, seeds_re, seeds_im);
}

Eigenpair leading_eigenpair(const OSParams& p) {
  p.validate();
  if (!p.grid) throw InvalidParameter("leading_eigenpair: grid required");
  auto basis = build_stream_basis(p.grid);
  ModeOperator op = build_mode_operator(basis, p.profile, p.alpha, p.n, p.nu);
  std::vector<cd> spec = galerkin_spectrum(op);
  std::sort(spec.begin(), spec.end(), [](cd a, cd b) { return a.real() > b.real(); });
  for (const cd& lam : spec) {
    if (far_field_root(p, lam).real() <= p.eta) continue;
    try {
      Eigenpair e = eigen_search(p, lam);
      if (std::abs(e.lambda - lam) <= 1e-3 * std::max(std::abs(lam), 1e-3)) return e;
    } catch (const NumericalError&) {
    }
  }
  throw NumericalError("leading_eigenpair: no admissible eigenvalue found");
}

}  // namespace shearhopf
