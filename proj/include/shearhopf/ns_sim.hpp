#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "shearhopf/errors.hpp"
#include "shearhopf/galerkin.hpp"
#include "shearhopf/grid.hpp"
#include "shearhopf/hopf.hpp"
#include "shearhopf/profile.hpp"

namespace shearhopf {

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct SimInit {
  enum class Kind { none, eigenmode, wave, noise };
  Kind kind = Kind::eigenmode;
  double amplitude = 1e-3;  // eigenmode or noise amplitude
  std::uint64_t seed = 1;   // noise generator seed
  // Wave seed: eps V1 + eps^2 V2 sampled on the simulation grid.
  std::shared_ptr<const BifurcatedWave> wave;
  // Optional zero-mode bump z * y * exp(-y / width).
  double zero_mode_amplitude = 0.0;
  double zero_mode_width = 1.0;
};

struct SimConfig {
  double alpha = 0.0;
  double nu = 0.0;
  ShearProfile profile;
  int n_modes = 8;
  GridPtr grid;
  double dt = 1.0;
  double t_end = 0.0;
  SimInit init;
  bool nonlinear = true;
  bool shear = true;            // base-flow terms in the linear operator
  double sample_every = 10.0;   // trace sampling interval in time units
  // Amplitude projection: mode-1 eigenpair of the discrete operator at
  // projection_nu (0 selects nu), in the frame rotating at its frequency.
  double projection_nu = 0.0;
  // Nonzero: use the eigenvalue nearest to this seed instead of the one with
  // the largest real part (box modes near -i k U+ can outrank a damped mode).
  cd projection_seed{0.0, 0.0};
  double eta = 0.0;             // decay weight separating discrete modes; 0 selects 0.45 alpha
  std::string checkpoint_path;  // empty disables checkpoints
  double checkpoint_every = 0.0;

  void validate() const;
  std::string hash() const;
};

// Harmonics n = 0..N of the perturbation; n < 0 follow by conjugation.
// Modes n >= 1 are stored as stream-function coefficients on the Galerkin
// basis, the zero mode as nodal x-velocity evolved by collocation.
struct SimState {
  double t = 0.0;
  long steps = 0;
  std::vector<Eigen::VectorXcd> coeffs;  // index n - 1
  Eigen::VectorXd u0;
  // Multistep history.
  std::vector<Eigen::VectorXcd> coeffs_prev, load_prev;
  Eigen::VectorXd u0_prev, zload_prev;
  bool has_history = false;
  double norm_ref = 0.0;  // norm at t = 0 for the blow-up detector
};

struct AmplitudeTrace {
  std::vector<double> times;
  std::vector<cd> amplitude;  // <v_1, zeta*> e^{-i frame_omega t}
  std::vector<double> zero_mode_norm;
  std::vector<double> oscillatory_norm;
  double frame_omega = 0.0;
};

class NsSimulator {
 public:
  explicit NsSimulator(SimConfig cfg);

  const SimConfig& config() const { return cfg_; }
  // seed_scale multiplies the seed amplitude (eps for a wave seed).
  SimState initial_state(double seed_scale = 1.0) const;
  SimState step(const SimState& s) const;
  AmplitudeTrace run() const;
  // Advances s in place to t_end, sampling along the way.
  AmplitudeTrace run_from(SimState& s, double t_end) const;
  // Backward-Euler step of the zero mode alone (pure diffusion, no coupling).
  void diffuse_zero_mode(SimState& s, double dt) const;

  // Diagnostics of a state.
  cd amplitude(const SimState& s) const;
  double zero_mode_norm(const SimState& s) const;
  double oscillatory_norm(const SimState& s) const;
  double energy(const SimState& s) const;
  VelocityMode mode_velocity(const SimState& s, int n) const;
  Eigen::VectorXcd vorticity(const SimState& s, int n) const;
  double frame_omega() const { return frame_omega_; }
  // Mode-1 eigenfunction used by the projection (max |psi| = 1).
  const Eigen::VectorXcd& projection_mode() const { return proj_right_; }
  const ModeOperator& mode_operator(int n) const { return ops_[n - 1]; }

 private:
  struct Nonlinear {
    std::vector<Eigen::VectorXcd> load;  // per mode n >= 1
    Eigen::VectorXd zload;               // zero mode
  };
  Nonlinear nonlinear_terms(const SimState& s) const;
  void sample(const SimState& s, AmplitudeTrace& tr) const;

  SimConfig cfg_;
  std::shared_ptr<const StreamBasis> basis_;
  std::vector<ModeOperator> ops_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lu_bdf2_, lu_euler_;
  Eigen::MatrixXd zero_mode_matrix(double c, double h) const;
  Eigen::PartialPivLU<Eigen::MatrixXd> zlu_bdf2_, zlu_euler_;
  Eigen::VectorXcd proj_right_, proj_left_;
  cd proj_norm_;
  double frame_omega_ = 0.0;
  int mx_ = 0;
  Eigen::MatrixXcd syn_, dsyn_, ana_;
  Eigen::VectorXcd ik_;
};

struct LimitCycle {
  double amp_sat = 0.0;
  double freq = 0.0;        // lab-frame angular frequency of the mode-1 component
  double drift = 0.0;       // relative change of |A| across the averaging window
};

// Mean |A| and phase rate over the last 20% of the trace. Throws
// NumericalError("not converged to cycle") when |A| drifts by 1% or more.
LimitCycle measure_limit_cycle(const AmplitudeTrace& trace, double window_fraction = 0.2);

// Same statistics over the samples with t in [t0, t1], without the drift check.
LimitCycle cycle_statistics(const AmplitudeTrace& trace, double t0, double t1);

// Unstable cycle by bisection on the size of a wave seed: seeds below the
// cycle decay, seeds above it grow. Used when the bifurcation is subcritical
// and no saturated state exists.
struct EdgeOptions {
  double scale_lo = 0.9;   // bracket on the seed scale
  double scale_hi = 1.2;
  double rel_tol = 5e-3;   // stop when (hi - lo) / lo falls below this
  double up = 1.3;         // |A| / |A(0)| deciding growth
  double down = 0.7;       // and decay
  double t_max = 0.0;      // per run, required
  double separation = 0.02;  // relative |A| gap ending the shadowing window
  double skip = 0.25;        // leading fraction of the window dropped as transient
  int max_runs = 14;
};

struct EdgeRun {
  double scale = 0.0;
  int outcome = 0;  // +1 grew, -1 decayed, 0 undecided
  double t_decided = 0.0;
};

struct EdgeResult {
  double scale_lo = 0.0, scale_hi = 0.0;
  double window_start = 0.0, window_end = 0.0;
  LimitCycle cycle;  // amplitude and frequency while the bracketing runs shadow the cycle
  AmplitudeTrace below, above;
  std::vector<EdgeRun> runs;
};

// cfg.init must be a wave seed.
EdgeResult track_unstable_cycle(const SimConfig& cfg, const EdgeOptions& opt = {});

// Least-squares log-linear rate of a positive series over [t0, t1].
struct RateFit {
  double rate = 0.0;      // d log(series)/dt
  double log_c = 0.0;
  double residual = 0.0;  // rms of log residuals
};
RateFit fit_exponential(const std::vector<double>& t, const std::vector<double>& v, double t0, double t1);

struct ZeroModeDecayReport {
  bool trivial = false;
  double window_start = 0.0, window_end = 0.0;
  double exp_c = 0.0, exp_rate = 0.0, exp_residual = 0.0;
  double alg_c = 0.0, alg_residual = 0.0;
  bool algebraic_better = false;
  double osc_rate = 0.0;           // fitted decay rate of the oscillatory part (positive)
  double osc_window_start = 0.0, osc_window_end = 0.0;
  AmplitudeTrace trace;
};

struct DecayProbeOptions {
  double full_time = 0.0;       // coupled phase duration; 0 selects 15/|decay| from the trace
  double expected_rate = 0.0;   // |Re lambda| used for the default duration
  double window_lo = 10.0;      // tail window in units of 1/(nu alpha^2)
  double window_hi = 100.0;
  double dt_growth = 0.01;      // diffusion-only phase uses dt = dt_growth * t
};

// Runs the coupled simulation on the stable side, then continues the zero
// mode alone (the oscillatory part has decayed below any quadratic feedback)
// with growing steps up to window_hi / (nu alpha^2), and compares C e^{-rt}
// with C/(1+t) on the tail window.
ZeroModeDecayReport zero_mode_decay_probe(const SimConfig& cfg, const DecayProbeOptions& opt = {});

void write_trace_csv(const AmplitudeTrace& trace, const std::string& path);
void save_checkpoint(const std::string& path, const SimState& s, const SimConfig& cfg);
SimState load_checkpoint(const std::string& path, const SimConfig& cfg);

}  // namespace shearhopf
