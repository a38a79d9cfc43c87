#include "shearhopf/neutral_curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shearhopf/errors.hpp"

namespace shearhopf {

namespace {

OSParams make_params(double alpha, double nu, const ShearProfile& profile, double eta,
                     const GridPtr& grid, double tol) {
  OSParams p;
  p.alpha = alpha;
  p.nu = nu;
  p.profile = profile;
  p.eta = eta;
  p.grid = grid;
  p.tol = tol;
  p.validate();
  return p;
}

OSParams without_grid(OSParams p) {
  p.grid = nullptr;
  return p;
}

std::string fmt_point(double alpha, double nu, cd lambda) {
  std::ostringstream os;
  os.precision(10);
  os << "alpha=" << alpha << " nu=" << nu << " lambda=" << lambda.real() << (lambda.imag() < 0 ? "" : "+")
     << lambda.imag() << "i";
  return os.str();
}

// Eigenvalue tracked from (nu_from, lambda_from) to nu_to by geometric
// substeps; each solve is seeded by linear extrapolation of the last two.
cd track_in_nu(const OSParams& base, double nu_from, cd lambda_from, double nu_to) {
  double nu = nu_from;
  cd lam = lambda_from, lam_prev = lambda_from;
  double nu_prev = nu_from;
  double ratio = 1.08;
  int halvings = 0;
  while (nu != nu_to) {
    double step = (nu_to > nu) ? std::min(nu * ratio, nu_to) : std::max(nu / ratio, nu_to);
    cd guess = lam;
    if (nu_prev != nu) guess = lam + (lam - lam_prev) * ((step - nu) / (nu - nu_prev));
    OSParams p = base;
    p.nu = step;
    SearchOptions so;
    so.reject_essential = true;
    bool ok = false;
    cd found;
    try {
      found = eigen_search(p, guess, so).lambda;
      // A converged root far from the prediction signals a branch switch.
      const double scale = std::max(std::abs(lam - lam_prev), 1e-3 * std::abs(lam)) + 1e-12;
      ok = std::abs(found - guess) < 4.0 * scale;
    } catch (const NumericalError&) {
      ok = false;
    }
    if (!ok) {
      if (++halvings > 10)
        throw NumericalError("eigenvalue branch lost during continuation; last good point " +
                             fmt_point(base.alpha, nu, lam));
      ratio = 1.0 + 0.5 * (ratio - 1.0);
      continue;
    }
    halvings = 0;
    nu_prev = nu;
    lam_prev = lam;
    nu = step;
    lam = found;
  }
  return lam;
}

cd track_in_alpha(const OSParams& base, double alpha_from, cd lambda_from, double alpha_to) {
  double a = alpha_from;
  cd lam = lambda_from, lam_prev = lambda_from;
  double a_prev = alpha_from;
  double h = 0.002 * std::max(std::abs(alpha_to), 1e-3);
  int halvings = 0;
  while (a != alpha_to) {
    double next = alpha_to > a ? std::min(a + h, alpha_to) : std::max(a - h, alpha_to);
    cd guess = lam;
    if (a_prev != a) guess = lam + (lam - lam_prev) * ((next - a) / (a - a_prev));
    OSParams p = base;
    p.alpha = next;
    bool ok = false;
    cd found;
    try {
      found = eigen_search(p, guess).lambda;
      const double scale = std::max(std::abs(lam - lam_prev), 1e-3 * std::abs(lam)) + 1e-12;
      ok = std::abs(found - guess) < 4.0 * scale;
    } catch (const NumericalError&) {
      ok = false;
    }
    if (!ok) {
      if (++halvings > 10)
        throw NumericalError("eigenvalue branch lost during continuation in alpha; last good point " +
                             fmt_point(a, base.nu, lam));
      h *= 0.5;
      continue;
    }
    halvings = 0;
    a_prev = a;
    lam_prev = lam;
    a = next;
    lam = found;
  }
  return lam;
}

cd vector_laplacian_pair(const VelocityMode& z, const VelocityMode& zs) {
  const double k = z.n() * z.alpha;
  VelocityMode r = z;
  r.vx.values = z.grid()->d2 * z.vx.values - k * k * z.vx.values;
  r.vy.values = z.grid()->d2 * z.vy.values - k * k * z.vy.values;
  return weighted_inner(r, zs);
}

}  // namespace

MarginalPoint find_marginal(double alpha, std::pair<double, double> nu_bracket,
                            const ShearProfile& profile, double eta, const GridPtr& grid,
                            const cd* lambda_seed, const MarginalOptions& opt) {
  double lo = std::min(nu_bracket.first, nu_bracket.second);
  double hi = std::max(nu_bracket.first, nu_bracket.second);
  if (!(lo > 0.0) || !(hi > lo)) throw InvalidParameter("find_marginal: invalid viscosity bracket");
  OSParams base = make_params(alpha, lo, profile, eta, grid, opt.tol);
  OSParams marcher = without_grid(base);

  cd lam_lo;
  if (lambda_seed) {
    lam_lo = eigen_search(marcher, *lambda_seed).lambda;
  } else {
    if (!grid) throw InvalidParameter("find_marginal: a grid or a seed eigenvalue is required");
    lam_lo = leading_eigenpair(base).lambda;
  }
  cd lam_hi = track_in_nu(marcher, lo, lam_lo, hi);
  double f_lo = lam_lo.real(), f_hi = lam_hi.real();
  if (f_lo * f_hi > 0.0) {
    std::ostringstream os;
    os.precision(6);
    os << "not bracketed: Re lambda = " << f_lo << " at nu = " << lo << " and " << f_hi << " at nu = " << hi;
    throw NumericalError(os.str());
  }

  // Illinois regula falsi in nu; every evaluation is seeded by interpolating
  // the eigenvalue between the current bracket ends.
  double a = lo, b = hi;
  cd la = lam_lo, lb = lam_hi;
  double fa = f_lo, fb = f_hi;
  int side = 0;
  int it = 0;
  double nu = a;
  cd lam = la;
  if (fa == 0.0) {
    nu = a;
    lam = la;
  } else if (fb == 0.0) {
    nu = b;
    lam = lb;
  } else {
    for (;; ++it) {
      if (it >= opt.max_iter)
        throw NumericalError("find_marginal: no convergence; last point " + fmt_point(alpha, nu, lam));
      double c = (a * fb - b * fa) / (fb - fa);
      if (!(c > std::min(a, b) && c < std::max(a, b))) c = 0.5 * (a + b);
      const double t = (c - a) / (b - a);
      cd guess = la + t * (lb - la);
      OSParams p = marcher;
      p.nu = c;
      Eigenpair e = eigen_search(p, guess);
      if (std::abs(e.lambda - guess) > 0.25 * std::abs(lb - la) + 1e-9 * std::abs(guess))
        throw NumericalError("find_marginal: eigenvalue branch lost; last good point " + fmt_point(alpha, a, la));
      nu = c;
      lam = e.lambda;
      const double fc = lam.real();
      if (std::abs(fc) <= opt.re_tol || std::abs(b - a) <= 1e-15 * c) break;
      if ((fc < 0.0) == (fa < 0.0)) {
        a = c;
        la = lam;
        fa = fc;
        if (side == -1) fb *= 0.5;
        side = -1;
      } else {
        b = c;
        lb = lam;
        fb = fc;
        if (side == 1) fa *= 0.5;
        side = 1;
      }
    }
  }

  MarginalPoint mp;
  mp.alpha = alpha;
  mp.nu0 = nu;
  mp.iterations = it;
  mp.params = base;
  mp.params.nu = nu;
  mp.eigen = eigen_search(mp.params, lam);
  mp.omega0 = mp.eigen.lambda.imag();
  if (std::abs(mp.eigen.lambda.real()) > opt.re_tol)
    throw NumericalError("find_marginal: refined eigenvalue misses the real-part tolerance");

  const double h = opt.fd_rel_step * nu;
  OSParams fd = marcher;
  fd.tol = opt.fd_tol;
  fd.nu = nu + h;
  cd lp = eigen_search(fd, mp.eigen.lambda).lambda;
  fd.nu = nu - h;
  cd lm = eigen_search(fd, mp.eigen.lambda).lambda;
  mp.dlambda_dnu = (lp - lm) / (2.0 * h);
  mp.dre_dnu = mp.dlambda_dnu.real();
  return mp;
}

BranchTrace trace_upper_branch(const ShearProfile& profile, std::pair<double, double> alpha_range,
                               int n_points, double eta, const GridPtr& grid,
                               const MarginalPoint& start, const MarginalOptions& opt) {
  if (n_points < 1) throw InvalidParameter("trace_upper_branch: n_points must be positive");
  double a0 = std::min(alpha_range.first, alpha_range.second);
  double a1 = std::max(alpha_range.first, alpha_range.second);
  std::vector<double> targets;
  for (int i = 0; i < n_points; ++i)
    targets.push_back(n_points == 1 ? a0 : a0 + (a1 - a0) * i / (n_points - 1));
  if (eta >= std::abs(a0) / 2.0)
    throw InvalidParameter("trace_upper_branch: eta must stay below alpha/2 over the range");

  BranchTrace tr;
  std::vector<MarginalPoint> up, down;
  // Walk away from the start point in each direction.
  for (int dir : {+1, -1}) {
    std::vector<double> seq;
    for (double t : targets)
      if ((dir > 0 && t >= start.alpha) || (dir < 0 && t < start.alpha)) seq.push_back(t);
    if (dir < 0) std::reverse(seq.begin(), seq.end());
    MarginalPoint prev = start, prev2 = start;
    bool have2 = false;
    for (double t : seq) {
      try {
        // Predict nu0 by log-linear extrapolation of the branch.
        double nu_pred = prev.nu0;
        if (have2 && prev.alpha != prev2.alpha)
          nu_pred = prev.nu0 * std::exp(std::log(prev.nu0 / prev2.nu0) * (t - prev.alpha) / (prev.alpha - prev2.alpha));
        OSParams base = without_grid(make_params(prev.alpha, prev.nu0, profile, eta, nullptr, opt.tol));
        cd seed = prev.eigen.lambda;
        if (t != prev.alpha) seed = track_in_alpha(base, prev.alpha, seed, t);
        OSParams at = base;
        at.alpha = t;
        seed = track_in_nu(at, prev.nu0, seed, nu_pred);
        // Widen a bracket around the prediction until Re lambda changes sign.
        double width = 0.05;
        std::pair<double, double> br;
        bool bracketed = false;
        for (int k = 0; k < 8 && !bracketed; ++k, width *= 2.0) {
          double lo = nu_pred / (1.0 + width), hi = nu_pred * (1.0 + width);
          cd l_lo = track_in_nu(at, nu_pred, seed, lo);
          cd l_hi = track_in_nu(at, nu_pred, seed, hi);
          if (l_lo.real() * l_hi.real() <= 0.0) {
            br = {lo, hi};
            seed = l_lo;
            bracketed = true;
          }
        }
        if (!bracketed) throw NumericalError("bracket lost at alpha = " + std::to_string(t));
        MarginalPoint mp = find_marginal(t, br, profile, eta, grid, &seed, opt);
        const double da = std::abs(mp.alpha - prev.alpha);
        if (have2 && da > 0.0) {
          const double slope = std::abs(prev.omega0 - prev2.omega0) / std::abs(prev.alpha - prev2.alpha);
          if (std::abs(mp.omega0 - prev.omega0) > 10.0 * da * slope + 1e-12)
            tr.diagnostics.push_back("omega0 jump near alpha = " + std::to_string(t) + " (possible branch switch)");
        }
        (dir > 0 ? up : down).push_back(mp);
        if (mp.alpha != prev.alpha) {
          prev2 = prev;
          have2 = true;
        }
        prev = mp;
      } catch (const NumericalError& e) {
        tr.diagnostics.push_back(std::string("branch terminated: ") + e.what());
        break;
      }
    }
  }
  std::reverse(down.begin(), down.end());
  tr.points = down;
  tr.points.insert(tr.points.end(), up.begin(), up.end());
  for (size_t i = 2; i < tr.points.size(); ++i) {
    const double d1 = tr.points[i - 1].nu0 - tr.points[i - 2].nu0;
    const double d2 = tr.points[i].nu0 - tr.points[i - 1].nu0;
    if (d1 * d2 < 0.0) tr.monotone = false;
  }
  return tr;
}

AssumptionAudit audit_assumptions(const MarginalPoint& mp,
                                  const std::vector<std::pair<double, double>>& probe_offsets) {
  AssumptionAudit au;
  bool any1 = false, any2 = false, bad1 = false, bad2 = false;
  const OSParams gridless = without_grid(mp.params);
  for (const auto& [da, dn] : probe_offsets) {
    ProbeSample s;
    s.d_alpha = da;
    s.d_nu = dn;
    s.alpha = mp.alpha + da;
    s.nu = mp.nu0 + dn;
    const bool inside = (da <= 0.0 && dn >= 0.0) && (da != 0.0 || dn != 0.0);
    const bool outside = (da >= 0.0 && dn <= 0.0) && (da != 0.0 || dn != 0.0);
    try {
      cd seed = mp.eigen.lambda;
      OSParams p = gridless;
      if (da != 0.0) seed = track_in_alpha(p, mp.alpha, seed, s.alpha);
      p.alpha = s.alpha;
      if (dn != 0.0) seed = track_in_nu(p, mp.nu0, seed, s.nu);
      p.nu = s.nu;
      SearchOptions so;
      so.reject_essential = true;
      s.lambda = eigen_search(p, seed, so).lambda;
      s.ok = true;
    } catch (const NumericalError& e) {
      s.ok = false;
      s.note = e.what();
    }
    if (da == 0.0 && dn == 0.0) {
      if (s.ok && std::abs(s.lambda - mp.eigen.lambda) > 1e-8 * std::abs(mp.eigen.lambda))
        au.notes.push_back("zero-offset probe does not reproduce the marginal eigenvalue");
      au.a1_evidence.push_back(s);
      continue;
    }
    if (inside) {
      any1 = true;
      if (!s.ok || !(s.lambda.real() > 0.0)) bad1 = true;
      au.a1_evidence.push_back(s);
    } else if (outside) {
      any2 = true;
      if (!s.ok || !(s.lambda.real() < 0.0)) bad2 = true;
      au.a2_evidence.push_back(s);
    } else {
      s.note = "mixed-sign offset: side of the curve not determined by the offset alone";
      au.notes.push_back("skipped mixed-sign probe (" + std::to_string(da) + ", " + std::to_string(dn) + ")");
    }
  }
  au.a1_ok = any1 && !bad1;
  au.a2_ok = any2 && !bad2;

  au.a3_ok = mp.dre_dnu > 0.0;
  if (mp.params.grid) {
    try {
      AdjointPair adj = adjoint_eigenfunction(mp.eigen, mp.params, true);
      au.simple_ok = true;
      const cd pair = vector_laplacian_pair(eigenfunction_velocity(mp.eigen, mp.params), adj.zeta_star);
      const double gap = std::abs(pair - mp.dlambda_dnu) / std::abs(pair);
      if (gap > 1e-3) {
        au.a3_ok = false;
        au.notes.push_back("finite-difference d lambda/d nu disagrees with the adjoint pairing by " +
                           std::to_string(gap));
      }
    } catch (const NumericalError& e) {
      au.simple_ok = false;
      au.notes.push_back(std::string("simplicity check failed: ") + e.what());
    }
  } else {
    au.notes.push_back("no grid: simplicity and adjoint cross-check skipped");
  }
  au.notes.push_back("uniqueness audited within the contour only");
  return au;
}

std::vector<std::pair<double, double>> default_probe_offsets(const MarginalPoint& mp, double rel) {
  const double d = rel * mp.nu0;
  return {{0.0, 0.0}, {0.0, d}, {0.0, -d}};
}

}  // namespace shearhopf
