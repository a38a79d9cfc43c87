#include "shearhopf/ns_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

namespace shearhopf {

namespace {

double eta_of(const SimConfig& c) { return c.eta > 0.0 ? c.eta : 0.45 * c.alpha; }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

// Discrete eigenpair of a mode operator among eigenvalues whose far-field
// root has Re s > eta: nearest to seed if given, else largest real part.
GalerkinEigen select_discrete(const ModeOperator& op, double u_plus, double eta, cd seed) {
  std::vector<cd> ev = galerkin_spectrum(op);
  const double k = op.k();
  cd best;
  bool found = false;
  for (cd l : ev) {
    cd s = std::sqrt(cd(k * k, 0.0) + (l + cd(0.0, k * u_plus)) / op.nu);
    if (s.real() < 0.0) s = -s;
    if (s.real() <= eta) continue;
    const bool better = seed != cd(0.0, 0.0) ? std::abs(l - seed) < std::abs(best - seed) : l.real() > best.real();
    if (!found || better) {
      best = l;
      found = true;
    }
  }
  if (!found) throw NumericalError("ns_sim: no admissible mode-1 eigenvalue for the amplitude projection");
  return galerkin_eigenvector(op, best);
}

// Cheap norm for the blow-up detector.
double coefficient_norm(const SimState& s) {
  double e = s.u0.squaredNorm();
  for (const auto& c : s.coeffs) e += c.squaredNorm();
  return std::sqrt(e);
}

// m * x for real m and complex x without promoting m.
Eigen::MatrixXcd real_times(const Eigen::MatrixXd& m, const Eigen::MatrixXcd& x) {
  Eigen::MatrixXcd r(m.rows(), x.cols());
  r.real() = m * x.real();
  r.imag() = m * x.imag();
  return r;
}

}  // namespace

void SimConfig::validate() const {
  if (!(alpha > 0.0)) throw InvalidParameter("SimConfig: alpha must be positive");
  if (!(nu > 0.0)) throw InvalidParameter("SimConfig: nu must be positive");
  if (n_modes < 4) throw InvalidParameter("SimConfig: n_modes must be at least 4");
  if (!grid) throw InvalidParameter("SimConfig: grid required");
  if (!profile.u) throw InvalidParameter("SimConfig: profile not set");
  if (!(dt > 0.0)) throw InvalidParameter("SimConfig: dt must be positive");
  if (!(t_end >= 0.0)) throw InvalidParameter("SimConfig: t_end must be non-negative");
  if (!(sample_every > 0.0)) throw InvalidParameter("SimConfig: sample_every must be positive");
  // Linear terms are implicit; this keeps the stiffest viscous mode within
  // the range where the multistep damping is still accurate.
  const double kmax = n_modes * alpha;
  if (dt * nu * kmax * kmax > 1.0) throw InvalidParameter("SimConfig: dt too large for the viscous scale");
  if (init.kind == SimInit::Kind::wave && !init.wave) throw InvalidParameter("SimConfig: wave seed missing");
}

std::string SimConfig::hash() const {
  std::ostringstream os;
  os << std::setprecision(17) << alpha << ' ' << nu << ' ' << profile.name << ' ' << n_modes << ' '
     << grid->n_points << ' ' << grid->y_max << ' ' << grid->stretch << ' ' << dt << ' ' << nonlinear << ' '
     << shear << ' ' << projection_nu << ' ' << projection_seed.real() << ' ' << projection_seed.imag() << ' '
     << eta_of(*this);
  std::ostringstream h;
  h << std::hex << std::setw(16) << std::setfill('0') << fnv1a(os.str());
  return h.str();
}

NsSimulator::NsSimulator(SimConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  basis_ = build_stream_basis(cfg_.grid);
  const double dt = cfg_.dt;
  for (int n = 1; n <= cfg_.n_modes; ++n) {
    ops_.push_back(build_mode_operator(basis_, cfg_.profile, cfg_.alpha, n, cfg_.nu, cfg_.shear));
    const ModeOperator& op = ops_.back();
    lu_bdf2_.emplace_back(3.0 * op.mass - 2.0 * dt * op.stiff);
    lu_euler_.emplace_back(op.mass - dt * op.stiff);
  }
  zlu_bdf2_.compute(zero_mode_matrix(3.0, 2.0 * dt));
  zlu_euler_.compute(zero_mode_matrix(1.0, dt));

  const double pnu = cfg_.projection_nu > 0.0 ? cfg_.projection_nu : cfg_.nu;
  ModeOperator pop = build_mode_operator(basis_, cfg_.profile, cfg_.alpha, 1, pnu, true);
  GalerkinEigen ge = select_discrete(pop, cfg_.profile.u_plus, eta_of(cfg_), cfg_.projection_seed);
  Eigen::VectorXcd psi = pop.psi(ge.right);
  Eigen::Index imax = 0;
  psi.cwiseAbs().maxCoeff(&imax);
  const cd scale = 1.0 / psi(imax);
  proj_right_ = ge.right * scale;
  proj_left_ = ge.left;
  proj_norm_ = proj_left_.dot(ops_[0].mass * proj_right_);
  frame_omega_ = ge.lambda.imag();
  mx_ = 3 * cfg_.n_modes + 1;
  // Synthesis and analysis on mx equispaced x-points (3/2-rule dealiasing).
  const int nm = cfg_.n_modes;
  syn_.resize(mx_, nm + 1);
  dsyn_.resize(mx_, nm + 1);
  ana_.resize(nm + 1, mx_);
  for (int m = 0; m < mx_; ++m) {
    for (int n = 0; n <= nm; ++n) {
      const cd e = std::polar(1.0, 2.0 * std::numbers::pi * n * m / mx_);
      const double w = n == 0 ? 1.0 : 2.0;
      syn_(m, n) = w * e;
      dsyn_(m, n) = w * cd(0.0, n * cfg_.alpha) * e;
      ana_(n, m) = std::conj(e) / double(mx_);
    }
  }
  ik_.resize(nm);
  for (int n = 1; n <= nm; ++n) ik_(n - 1) = cd(0.0, n * cfg_.alpha);
}

// Collocation of c u - h nu u'' with u(0) = 0 and u'(y_max) = 0 as the
// first and last rows.
Eigen::MatrixXd NsSimulator::zero_mode_matrix(double c, double h) const {
  const HalfLineGrid& g = *cfg_.grid;
  const int np = g.n_points;
  Eigen::MatrixXd a = c * Eigen::MatrixXd::Identity(np, np) - h * cfg_.nu * g.d2;
  a.row(0).setZero();
  a(0, 0) = 1.0;
  a.row(np - 1) = g.d1.row(np - 1);
  return a;
}

SimState NsSimulator::initial_state(double seed_scale) const {
  const HalfLineGrid& g = *cfg_.grid;
  const int np = g.n_points;
  const int dim = basis_->dim();
  SimState s;
  s.coeffs.assign(cfg_.n_modes, Eigen::VectorXcd::Zero(dim));
  s.u0 = Eigen::VectorXd::Zero(np);
  const SimInit& in = cfg_.init;
  switch (in.kind) {
    case SimInit::Kind::none:
      break;
    case SimInit::Kind::eigenmode:
      s.coeffs[0] = seed_scale * in.amplitude * proj_right_;
      break;
    case SimInit::Kind::noise: {
      std::mt19937_64 rng(in.seed);
      std::normal_distribution<double> nd(0.0, 1.0);
      for (int n = 1; n <= cfg_.n_modes; ++n) {
        cd c[3];
        for (auto& x : c) x = cd(nd(rng), nd(rng));
        Eigen::VectorXcd psi(np);
        for (int j = 0; j < np; ++j) {
          const double y = g.nodes(j);
          psi(j) = (c[0] + c[1] * y + c[2] * y * y) * y * y * std::exp(-y);
        }
        Eigen::VectorXcd a = ops_[n - 1].coefficients(psi);
        const double e = std::sqrt(std::max(0.0, -a.dot(ops_[n - 1].mass * a).real()));
        if (e > 0.0) s.coeffs[n - 1] = a * (seed_scale * in.amplitude * std::pow(0.5, n - 1) / e);
      }
      break;
    }
    case SimInit::Kind::wave: {
      BifurcatedWave w = *in.wave;
      w.epsilon *= seed_scale;
      if (w.zeta.grid()->n_points != np || w.zeta.grid()->y_max != g.y_max ||
          w.zeta.grid()->stretch != g.stretch)
        throw InvalidParameter("ns_sim: wave seed lives on a different grid");
      for (int n = 1; n <= 2; ++n) {
        VelocityMode h = w.harmonic(n);
        Eigen::VectorXcd psi = h.vy.values / cd(0.0, n * cfg_.alpha);
        s.coeffs[n - 1] = ops_[n - 1].coefficients(psi);
      }
      s.u0 = w.harmonic(0).vx.values.real();
      break;
    }
  }
  if (in.zero_mode_amplitude != 0.0)
    for (int j = 0; j < np; ++j)
      s.u0(j) += in.zero_mode_amplitude * g.nodes(j) * std::exp(-g.nodes(j) / in.zero_mode_width);
  s.u0(0) = 0.0;
  s.norm_ref = coefficient_norm(s);
  return s;
}

NsSimulator::Nonlinear NsSimulator::nonlinear_terms(const SimState& s) const {
  const HalfLineGrid& g = *cfg_.grid;
  const int np = g.n_points, nm = cfg_.n_modes;
  const int dim = basis_->dim();
  Eigen::MatrixXcd c(dim, nm);
  for (int n = 0; n < nm; ++n) c.col(n) = s.coeffs[n];
  const Eigen::MatrixXcd psi = real_times(basis_->q, c);
  const Eigen::MatrixXcd dpsi = real_times(basis_->dq, c);
  const Eigen::MatrixXcd d2psi = real_times(basis_->d2q, c);
  // Spectral fields, rows n = 0..N.
  Eigen::MatrixXcd vx(nm + 1, np), vy(nm + 1, np), vxy(nm + 1, np), vyy(nm + 1, np);
  vx.row(0) = s.u0.cast<cd>().transpose();
  vy.row(0).setZero();
  vxy.row(0) = (g.d1 * s.u0).cast<cd>().transpose();
  vyy.row(0).setZero();
  vx.bottomRows(nm) = -dpsi.transpose();
  vy.bottomRows(nm) = (psi * ik_.asDiagonal()).transpose();
  vxy.bottomRows(nm) = -d2psi.transpose();
  vyy.bottomRows(nm) = (dpsi * ik_.asDiagonal()).transpose();
  Eigen::MatrixXd px = (syn_ * vx).real(), py = (syn_ * vy).real();
  Eigen::MatrixXd pxx = (dsyn_ * vx).real(), pyx = (dsyn_ * vy).real();
  Eigen::MatrixXd pxy = (syn_ * vxy).real(), pyy = (syn_ * vyy).real();
  Eigen::MatrixXd nx = -(px.cwiseProduct(pxx) + py.cwiseProduct(pxy));
  Eigen::MatrixXd ny = -(px.cwiseProduct(pyx) + py.cwiseProduct(pyy));
  // Analysis to harmonics, weighted by the quadrature for the loads.
  Eigen::MatrixXcd fx = (ana_ * nx).transpose(), fy = (ana_ * ny).transpose();  // np x (N+1)
  Nonlinear out;
  out.zload = fx.col(0).real();
  Eigen::MatrixXcd wfx = g.weights.asDiagonal() * fx.rightCols(nm);
  Eigen::MatrixXcd wfy = g.weights.asDiagonal() * fy.rightCols(nm) * ik_.asDiagonal();
  Eigen::MatrixXcd ld = -(real_times(basis_->dq.transpose(), wfx) + real_times(basis_->q.transpose(), wfy));
  for (int n = 0; n < nm; ++n) out.load.push_back(ld.col(n));
  return out;
}

SimState NsSimulator::step(const SimState& s) const {
  const int nm = cfg_.n_modes;
  const int m = cfg_.grid->n_points - 1;
  const double dt = cfg_.dt;
  Nonlinear nl;
  if (cfg_.nonlinear) {
    nl = nonlinear_terms(s);
  } else {
    nl.zload = Eigen::VectorXd::Zero(m + 1);
    for (int n = 1; n <= nm; ++n) nl.load.push_back(Eigen::VectorXcd::Zero(basis_->dim()));
  }
  SimState r;
  r.t = s.t + dt;
  r.steps = s.steps + 1;
  r.norm_ref = s.norm_ref;
  r.coeffs.resize(nm);
  r.u0 = Eigen::VectorXd::Zero(m + 1);
  const int last = m;
  if (!s.has_history) {
    for (int n = 0; n < nm; ++n)
      r.coeffs[n] = lu_euler_[n].solve(ops_[n].mass * s.coeffs[n] - dt * nl.load[n]);
    Eigen::VectorXd rhs = s.u0 + dt * nl.zload;
    rhs(0) = rhs(last) = 0.0;
    r.u0 = zlu_euler_.solve(rhs);
  } else {
    for (int n = 0; n < nm; ++n)
      r.coeffs[n] = lu_bdf2_[n].solve(ops_[n].mass * (4.0 * s.coeffs[n] - s.coeffs_prev[n]) -
                                      2.0 * dt * (2.0 * nl.load[n] - s.load_prev[n]));
    Eigen::VectorXd rhs = 4.0 * s.u0 - s.u0_prev + 2.0 * dt * (2.0 * nl.zload - s.zload_prev);
    rhs(0) = rhs(last) = 0.0;
    r.u0 = zlu_bdf2_.solve(rhs);
  }
  r.coeffs_prev = s.coeffs;
  r.load_prev = std::move(nl.load);
  r.u0_prev = s.u0;
  r.zload_prev = std::move(nl.zload);
  r.has_history = true;
  const double e = coefficient_norm(r);
  if (!std::isfinite(e)) throw DivergenceError("ns_sim: non-finite state at t = " + std::to_string(r.t));
  if (r.norm_ref > 0.0 && e > 1e10 * r.norm_ref)
    throw DivergenceError("ns_sim: norm grew by more than 1e10 at t = " + std::to_string(r.t));
  return r;
}

void NsSimulator::diffuse_zero_mode(SimState& s, double dt) const {
  Eigen::VectorXd rhs = s.u0;
  rhs(0) = rhs(rhs.size() - 1) = 0.0;
  s.u0 = zero_mode_matrix(1.0, dt).partialPivLu().solve(rhs);
  s.t += dt;
  ++s.steps;
  s.has_history = false;
}

cd NsSimulator::amplitude(const SimState& s) const {
  const cd p = proj_left_.dot(ops_[0].mass * s.coeffs[0]) / proj_norm_;
  return p * std::polar(1.0, -frame_omega_ * s.t);
}

double NsSimulator::zero_mode_norm(const SimState& s) const {
  const HalfLineGrid& g = *cfg_.grid;
  return s.u0.cwiseAbs().maxCoeff() + (g.d1 * s.u0).cwiseAbs().maxCoeff() + (g.d2 * s.u0).cwiseAbs().maxCoeff();
}

double NsSimulator::oscillatory_norm(const SimState& s) const {
  double e = 0.0;
  for (int n = 0; n < cfg_.n_modes; ++n) e += -2.0 * s.coeffs[n].dot(ops_[n].mass * s.coeffs[n]).real();
  return std::sqrt(std::max(e, 0.0));
}

double NsSimulator::energy(const SimState& s) const {
  const double osc = oscillatory_norm(s);
  const double z = s.u0.cwiseProduct(s.u0).dot(cfg_.grid->weights);
  return 0.5 * (osc * osc + z);
}

VelocityMode NsSimulator::mode_velocity(const SimState& s, int n) const {
  const double eta = eta_of(cfg_);
  if (n == 0) {
    VelocityMode v = VelocityMode::zeros(cfg_.grid, 0, cfg_.alpha, 0.0);
    v.vx.values = s.u0.cast<cd>();
    v.solenoidal = v.no_slip = true;
    return v;
  }
  if (n < 0) return mode_velocity(s, -n).conj();
  if (n > cfg_.n_modes) throw InvalidParameter("ns_sim: harmonic outside the truncation");
  return ops_[n - 1].velocity(s.coeffs[n - 1], eta);
}

Eigen::VectorXcd NsSimulator::vorticity(const SimState& s, int n) const {
  if (n == 0) return -(cfg_.grid->d1 * s.u0).cast<cd>();
  const ModeOperator& op = ops_[std::abs(n) - 1];
  const double k = op.k();
  Eigen::VectorXcd w = basis_->d2q.cast<cd>() * s.coeffs[std::abs(n) - 1] -
                       k * k * (basis_->q.cast<cd>() * s.coeffs[std::abs(n) - 1]);
  return n > 0 ? w : Eigen::VectorXcd(w.conjugate());
}

void NsSimulator::sample(const SimState& s, AmplitudeTrace& tr) const {
  tr.times.push_back(s.t);
  tr.amplitude.push_back(amplitude(s));
  tr.zero_mode_norm.push_back(zero_mode_norm(s));
  tr.oscillatory_norm.push_back(oscillatory_norm(s));
}

AmplitudeTrace NsSimulator::run() const {
  SimState s = initial_state();
  return run_from(s, cfg_.t_end);
}

AmplitudeTrace NsSimulator::run_from(SimState& s, double t_end) const {
  AmplitudeTrace tr;
  tr.frame_omega = frame_omega_;
  sample(s, tr);
  const long n_steps = std::lround((t_end - s.t) / cfg_.dt);
  const double t0 = s.t;
  double next_sample = s.t + cfg_.sample_every;
  double next_ckpt = cfg_.checkpoint_every > 0.0 ? s.t + cfg_.checkpoint_every : 0.0;
  for (long i = 0; i < n_steps; ++i) {
    s = step(s);
    s.t = t0 + (i + 1) * cfg_.dt;
    if (s.t >= next_sample - 1e-9 * cfg_.dt || i + 1 == n_steps) {
      sample(s, tr);
      next_sample += cfg_.sample_every;
    }
    if (!cfg_.checkpoint_path.empty() && cfg_.checkpoint_every > 0.0 && s.t >= next_ckpt - 1e-9 * cfg_.dt) {
      save_checkpoint(cfg_.checkpoint_path, s, cfg_);
      next_ckpt += cfg_.checkpoint_every;
    }
  }
  return tr;
}

LimitCycle cycle_statistics(const AmplitudeTrace& trace, double t0, double t1) {
  const size_t n = trace.times.size();
  size_t i0 = 0;
  while (i0 < n && trace.times[i0] < t0) ++i0;
  size_t i1 = i0;
  while (i1 < n && trace.times[i1] <= t1) ++i1;
  if (i1 - i0 < 3) throw NumericalError("cycle_statistics: window holds fewer than three samples");
  double sum = 0.0;
  for (size_t i = i0; i < i1; ++i) sum += std::abs(trace.amplitude[i]);
  LimitCycle lc;
  lc.amp_sat = sum / double(i1 - i0);
  lc.drift = std::abs(std::abs(trace.amplitude[i1 - 1]) - std::abs(trace.amplitude[i0])) / lc.amp_sat;
  // Unwrapped phase, then a least-squares slope.
  std::vector<double> ph;
  double prev = std::arg(trace.amplitude[i0]), off = 0.0;
  for (size_t i = i0; i < i1; ++i) {
    double p = std::arg(trace.amplitude[i]);
    double d = p - prev;
    if (d > std::numbers::pi) off -= 2.0 * std::numbers::pi;
    if (d < -std::numbers::pi) off += 2.0 * std::numbers::pi;
    prev = p;
    ph.push_back(p + off);
  }
  double st = 0, sp = 0, stt = 0, stp = 0;
  const double m = double(ph.size());
  for (size_t i = 0; i < ph.size(); ++i) {
    const double t = trace.times[i0 + i];
    st += t;
    sp += ph[i];
    stt += t * t;
    stp += t * ph[i];
  }
  lc.freq = trace.frame_omega + (m * stp - st * sp) / (m * stt - st * st);
  return lc;
}

LimitCycle measure_limit_cycle(const AmplitudeTrace& trace, double window_fraction) {
  if (trace.times.size() < 4) throw NumericalError("measure_limit_cycle: trace too short");
  const double t_end = trace.times.back();
  const double t_w = t_end - window_fraction * (t_end - trace.times.front());
  LimitCycle lc = cycle_statistics(trace, t_w, t_end);
  if (!(lc.drift < 0.01)) throw NumericalError("not converged to cycle");
  return lc;
}

namespace {

// Runs one seed until |A| leaves [down, up] * |A(0)| or t_max passes.
EdgeRun classify_seed(const NsSimulator& sim, double scale, const EdgeOptions& opt, AmplitudeTrace& tr) {
  EdgeRun r;
  r.scale = scale;
  SimState s = sim.initial_state(scale);
  const double a0 = std::abs(sim.amplitude(s));
  if (!(a0 > 0.0)) throw InvalidParameter("track_unstable_cycle: seed has no mode-1 amplitude");
  const double every = sim.config().sample_every;
  tr = AmplitudeTrace{};
  tr.frame_omega = sim.frame_omega();
  auto record = [&] {
    tr.times.push_back(s.t);
    tr.amplitude.push_back(sim.amplitude(s));
    tr.zero_mode_norm.push_back(sim.zero_mode_norm(s));
    tr.oscillatory_norm.push_back(sim.oscillatory_norm(s));
  };
  record();
  double next = every;
  try {
    while (s.t < opt.t_max) {
      s = sim.step(s);
      if (s.t < next - 1e-9) continue;
      next += every;
      record();
      const double rel = std::abs(tr.amplitude.back()) / a0;
      if (rel > opt.up || rel < opt.down) {
        r.outcome = rel > opt.up ? 1 : -1;
        break;
      }
    }
  } catch (const DivergenceError&) {
    r.outcome = 1;
  }
  r.t_decided = s.t;
  return r;
}

}  // namespace

EdgeResult track_unstable_cycle(const SimConfig& cfg, const EdgeOptions& opt) {
  if (cfg.init.kind != SimInit::Kind::wave) throw InvalidParameter("track_unstable_cycle: needs a wave seed");
  if (!(opt.t_max > 0.0)) throw InvalidParameter("track_unstable_cycle: t_max must be positive");
  if (!(opt.scale_lo < opt.scale_hi)) throw InvalidParameter("track_unstable_cycle: empty bracket");
  NsSimulator sim(cfg);
  EdgeResult res;
  AmplitudeTrace tr;
  EdgeRun lo = classify_seed(sim, opt.scale_lo, opt, tr);
  res.runs.push_back(lo);
  if (lo.outcome != -1) throw NumericalError("track_unstable_cycle: lower seed does not decay; edge not bracketed");
  res.below = tr;
  EdgeRun hi = classify_seed(sim, opt.scale_hi, opt, tr);
  res.runs.push_back(hi);
  if (hi.outcome != 1) throw NumericalError("track_unstable_cycle: upper seed does not grow; edge not bracketed");
  res.above = tr;
  double a = opt.scale_lo, b = opt.scale_hi;
  while ((b - a) / a > opt.rel_tol && static_cast<int>(res.runs.size()) < opt.max_runs) {
    const double mid = 0.5 * (a + b);
    EdgeRun r = classify_seed(sim, mid, opt, tr);
    res.runs.push_back(r);
    if (r.outcome == 0) throw NumericalError("track_unstable_cycle: seed undecided within t_max");
    if (r.outcome > 0) {
      b = mid;
      res.above = tr;
    } else {
      a = mid;
      res.below = tr;
    }
  }
  res.scale_lo = a;
  res.scale_hi = b;
  // Shadowing window: both runs within the separation tolerance.
  const size_t n = std::min(res.below.times.size(), res.above.times.size());
  size_t k = 0;
  while (k < n) {
    const double x = std::abs(res.below.amplitude[k]), y = std::abs(res.above.amplitude[k]);
    if (std::abs(y - x) > opt.separation * 0.5 * (x + y)) break;
    ++k;
  }
  if (k < 4) throw NumericalError("track_unstable_cycle: bracketing runs separate immediately");
  res.window_end = res.above.times[k - 1];
  res.window_start = opt.skip * res.window_end;
  LimitCycle lb = cycle_statistics(res.below, res.window_start, res.window_end);
  LimitCycle la = cycle_statistics(res.above, res.window_start, res.window_end);
  res.cycle.amp_sat = 0.5 * (lb.amp_sat + la.amp_sat);
  res.cycle.freq = 0.5 * (lb.freq + la.freq);
  res.cycle.drift = std::max(lb.drift, la.drift);
  return res;
}

RateFit fit_exponential(const std::vector<double>& t, const std::vector<double>& v, double t0, double t1) {
  double st = 0, sl = 0, stt = 0, stl = 0;
  int m = 0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1 || !(v[i] > 0.0)) continue;
    const double l = std::log(v[i]);
    st += t[i];
    sl += l;
    stt += t[i] * t[i];
    stl += t[i] * l;
    ++m;
  }
  if (m < 3) throw NumericalError("fit_exponential: fewer than three samples in the window");
  RateFit f;
  f.rate = (m * stl - st * sl) / (m * stt - st * st);
  f.log_c = (sl - f.rate * st) / m;
  double r = 0.0;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t0 || t[i] > t1 || !(v[i] > 0.0)) continue;
    const double e = std::log(v[i]) - (f.log_c + f.rate * t[i]);
    r += e * e;
  }
  f.residual = std::sqrt(r / m);
  return f;
}

ZeroModeDecayReport zero_mode_decay_probe(const SimConfig& cfg, const DecayProbeOptions& opt) {
  ZeroModeDecayReport rep;
  NsSimulator sim(cfg);
  SimState s = sim.initial_state();
  if (sim.energy(s) == 0.0) {
    rep.trivial = true;
    rep.trace.frame_omega = sim.frame_omega();
    rep.trace.times.push_back(0.0);
    rep.trace.amplitude.push_back(0.0);
    rep.trace.zero_mode_norm.push_back(0.0);
    rep.trace.oscillatory_norm.push_back(0.0);
    return rep;
  }
  double t1 = opt.full_time;
  if (!(t1 > 0.0)) {
    if (!(opt.expected_rate > 0.0))
      throw InvalidParameter("zero_mode_decay_probe: need full_time or expected_rate");
    t1 = 15.0 / opt.expected_rate;
  }
  rep.trace = sim.run_from(s, t1);
  rep.osc_window_start = 0.3 * t1;
  rep.osc_window_end = t1;
  if (sim.oscillatory_norm(s) > 0.0) {
    RateFit of = fit_exponential(rep.trace.times, rep.trace.oscillatory_norm, rep.osc_window_start, t1);
    rep.osc_rate = -of.rate;
  }
  // Zero mode alone from here on.
  const double tau = 1.0 / (cfg.nu * cfg.alpha * cfg.alpha);
  rep.window_start = opt.window_lo * tau;
  rep.window_end = opt.window_hi * tau;
  while (s.t < rep.window_end) {
    const double dt = std::min(std::max(opt.dt_growth * s.t, cfg.dt), rep.window_end - s.t);
    sim.diffuse_zero_mode(s, dt);
    rep.trace.times.push_back(s.t);
    rep.trace.amplitude.push_back(0.0);
    rep.trace.zero_mode_norm.push_back(sim.zero_mode_norm(s));
    rep.trace.oscillatory_norm.push_back(0.0);
  }
  const auto& tt = rep.trace.times;
  const auto& zz = rep.trace.zero_mode_norm;
  RateFit ef = fit_exponential(tt, zz, rep.window_start, rep.window_end);
  rep.exp_rate = -ef.rate;
  rep.exp_c = std::exp(ef.log_c);
  rep.exp_residual = ef.residual;
  double sl = 0.0;
  int m = 0;
  for (size_t i = 0; i < tt.size(); ++i) {
    if (tt[i] < rep.window_start || tt[i] > rep.window_end || !(zz[i] > 0.0)) continue;
    sl += std::log(zz[i]) + std::log1p(tt[i]);
    ++m;
  }
  const double log_c = sl / m;
  double r = 0.0;
  for (size_t i = 0; i < tt.size(); ++i) {
    if (tt[i] < rep.window_start || tt[i] > rep.window_end || !(zz[i] > 0.0)) continue;
    const double e = std::log(zz[i]) - (log_c - std::log1p(tt[i]));
    r += e * e;
  }
  rep.alg_c = std::exp(log_c);
  rep.alg_residual = std::sqrt(r / m);
  rep.algebraic_better = rep.alg_residual < rep.exp_residual;
  return rep;
}

void write_trace_csv(const AmplitudeTrace& tr, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << std::setprecision(17);
  os << "t,re_A,im_A,abs_A,zero_mode_norm,oscillatory_norm\n";
  for (size_t i = 0; i < tr.times.size(); ++i)
    os << tr.times[i] << ',' << tr.amplitude[i].real() << ',' << tr.amplitude[i].imag() << ','
       << std::abs(tr.amplitude[i]) << ',' << tr.zero_mode_norm[i] << ',' << tr.oscillatory_norm[i] << '\n';
}

namespace {

nlohmann::json cvec(const Eigen::VectorXcd& v) {
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v(i).real());
    im.push_back(v(i).imag());
  }
  return {{"re", re}, {"im", im}};
}

Eigen::VectorXcd cvec_from(const nlohmann::json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  Eigen::VectorXcd v(re.size());
  for (size_t i = 0; i < re.size(); ++i) v(i) = cd(re[i].get<double>(), im[i].get<double>());
  return v;
}

nlohmann::json rvec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd rvec_from(const nlohmann::json& j) {
  auto x = j.get<std::vector<double>>();
  return Eigen::Map<Eigen::VectorXd>(x.data(), x.size());
}

}  // namespace

void save_checkpoint(const std::string& path, const SimState& s, const SimConfig& cfg) {
  nlohmann::json j;
  j["format"] = "shearhopf-checkpoint";
  j["version"] = 1;
  j["config_hash"] = cfg.hash();
  j["alpha"] = cfg.alpha;
  j["nu"] = cfg.nu;
  j["n_modes"] = cfg.n_modes;
  j["grid"] = {{"n_points", cfg.grid->n_points}, {"y_max", cfg.grid->y_max}, {"stretch", cfg.grid->stretch}};
  j["t"] = s.t;
  j["steps"] = s.steps;
  j["norm_ref"] = s.norm_ref;
  j["has_history"] = s.has_history;
  j["u0"] = rvec(s.u0);
  for (const auto& c : s.coeffs) j["coeffs"].push_back(cvec(c));
  if (s.has_history) {
    j["u0_prev"] = rvec(s.u0_prev);
    j["zload_prev"] = rvec(s.zload_prev);
    for (const auto& c : s.coeffs_prev) j["coeffs_prev"].push_back(cvec(c));
    for (const auto& c : s.load_prev) j["load_prev"].push_back(cvec(c));
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << std::setprecision(17) << j.dump(1) << '\n';
}

SimState load_checkpoint(const std::string& path, const SimConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  nlohmann::json j = nlohmann::json::parse(is);
  if (j.at("format") != "shearhopf-checkpoint") throw InvalidParameter("load_checkpoint: not a checkpoint file");
  if (j.at("config_hash").get<std::string>() != cfg.hash())
    throw InvalidParameter("load_checkpoint: checkpoint was written for a different configuration");
  SimState s;
  s.t = j.at("t");
  s.steps = j.at("steps");
  s.norm_ref = j.at("norm_ref");
  s.has_history = j.at("has_history");
  s.u0 = rvec_from(j.at("u0"));
  for (const auto& c : j.at("coeffs")) s.coeffs.push_back(cvec_from(c));
  if (s.has_history) {
    s.u0_prev = rvec_from(j.at("u0_prev"));
    s.zload_prev = rvec_from(j.at("zload_prev"));
    for (const auto& c : j.at("coeffs_prev")) s.coeffs_prev.push_back(cvec_from(c));
    for (const auto& c : j.at("load_prev")) s.load_prev.push_back(cvec_from(c));
  }
  return s;
}

}  // namespace shearhopf
