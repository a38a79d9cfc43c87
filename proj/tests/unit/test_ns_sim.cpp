#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "fixture.hpp"
#include "shearhopf/errors.hpp"
#include "shearhopf/ns_sim.hpp"

using namespace shearhopf;

namespace {

SimConfig small_config() {
  SimConfig c;
  c.alpha = fixture::kAlpha;
  c.nu = 1e-5;
  c.profile = make_exponential();
  c.n_modes = 4;
  c.grid = build_grid(GridSpec{48, 2.0, 0.0}, fixture::kEta);
  c.dt = 2.0;
  c.t_end = 40.0;
  c.sample_every = 10.0;
  c.eta = fixture::kEta;
  return c;
}

double coeff_norm(const SimState& s) {
  double n = s.u0.squaredNorm();
  for (const auto& a : s.coeffs) n += a.squaredNorm();
  return std::sqrt(n);
}

}  // namespace

TEST_CASE("zero state is a fixed point") {
  SimConfig c = small_config();
  c.init.kind = SimInit::Kind::none;
  NsSimulator sim(c);
  SimState s = sim.initial_state();
  for (int i = 0; i < 5; ++i) s = sim.step(s);
  CHECK(coeff_norm(s) == 0.0);
  CHECK(sim.energy(s) == 0.0);
}

TEST_CASE("t_end = 0 gives the initial sample only") {
  SimConfig c = small_config();
  c.t_end = 0.0;
  const AmplitudeTrace tr = NsSimulator(c).run();
  REQUIRE(tr.times.size() == 1);
  CHECK(tr.times[0] == 0.0);
  CHECK(tr.amplitude.size() == 1);
  CHECK(tr.zero_mode_norm.size() == 1);
}

TEST_CASE("configuration checks") {
  SimConfig c = small_config();
  c.n_modes = 3;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  c = small_config();
  c.dt = 0.0;
  CHECK_THROWS_AS(NsSimulator{c}, InvalidParameter);
  c = small_config();
  c.init.kind = SimInit::Kind::wave;
  CHECK_THROWS_AS(c.validate(), InvalidParameter);
  CHECK(small_config().hash() == small_config().hash());
  c = small_config();
  c.nu *= 1.01;
  CHECK(c.hash() != small_config().hash());
}

TEST_CASE("synthetic limit cycle") {
  AmplitudeTrace tr;
  const double r = 0.37, w = 0.013;
  for (int i = 0; i <= 1000; ++i) {
    tr.times.push_back(i);
    tr.amplitude.push_back(std::polar(r, w * i));
    tr.zero_mode_norm.push_back(0.0);
    tr.oscillatory_norm.push_back(r);
  }
  const LimitCycle lc = measure_limit_cycle(tr);
  CHECK(lc.amp_sat == doctest::Approx(r).epsilon(1e-14));
  CHECK(lc.freq == doctest::Approx(w).epsilon(1e-10));
  CHECK(lc.drift < 1e-12);

  tr.frame_omega = -0.02;
  CHECK(measure_limit_cycle(tr).freq == doctest::Approx(w - 0.02).epsilon(1e-10));

  for (size_t i = 0; i < tr.times.size(); ++i) tr.amplitude[i] *= std::exp(1e-4 * tr.times[i]);
  try {
    measure_limit_cycle(tr);
    FAIL("expected an error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()) == "not converged to cycle");
  }
}

TEST_CASE("exponential fit recovers a synthetic rate") {
  std::vector<double> t, v;
  for (int i = 0; i < 50; ++i) {
    t.push_back(i * 3.0);
    v.push_back(2.5 * std::exp(-0.02 * i * 3.0));
  }
  const RateFit f = fit_exponential(t, v, 0.0, 150.0);
  CHECK(f.rate == doctest::Approx(-0.02).epsilon(1e-12));
  CHECK(std::exp(f.log_c) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(f.residual < 1e-12);
}

TEST_CASE("energy decays without shear and nonlinearity") {
  SimConfig c = small_config();
  c.shear = false;
  c.nonlinear = false;
  c.nu = 1e-3;
  c.init.kind = SimInit::Kind::noise;
  c.init.amplitude = 1e-3;
  c.init.zero_mode_amplitude = 1e-3;
  NsSimulator sim(c);
  SimState s = sim.initial_state();
  double e = sim.energy(s);
  REQUIRE(e > 0.0);
  for (int i = 0; i < 30; ++i) {
    s = sim.step(s);
    const double en = sim.energy(s);
    CHECK(en <= e * (1.0 + 1e-12));
    e = en;
  }
}

TEST_CASE("reconstructed fields stay solenoidal with no-slip") {
  SimConfig c = small_config();
  c.init.kind = SimInit::Kind::noise;
  c.init.amplitude = 1e-2;
  NsSimulator sim(c);
  SimState s = sim.initial_state();
  for (int i = 0; i < 10; ++i) s = sim.step(s);
  for (int n = 1; n <= c.n_modes; ++n) {
    const VelocityMode v = sim.mode_velocity(s, n);
    const double scale = std::max(v.vx.values.cwiseAbs().maxCoeff(), 1e-300);
    CHECK(v.divergence_sup() <= 1e-10 * scale * c.grid->n_points);
    CHECK(std::abs(v.vx.values(0)) <= 1e-12 * scale);
    CHECK(std::abs(v.vy.values(0)) <= 1e-12 * scale);
  }
  CHECK(std::abs(s.u0(0)) <= 1e-14 * s.u0.cwiseAbs().maxCoeff());
}

TEST_CASE("second-order accuracy in time") {
  SimConfig c = small_config();
  c.t_end = 64.0;
  c.sample_every = 64.0;
  c.init.kind = SimInit::Kind::eigenmode;
  c.init.amplitude = 1e-2;
  std::vector<cd> a;
  std::vector<double> z;
  for (double dt : {2.0, 1.0, 0.5}) {
    c.dt = dt;
    const AmplitudeTrace tr = NsSimulator(c).run();
    a.push_back(tr.amplitude.back());
    z.push_back(tr.zero_mode_norm.back());
  }
  const double ra = std::abs(a[0] - a[1]) / std::abs(a[1] - a[2]);
  const double rz = std::abs(z[0] - z[1]) / std::abs(z[1] - z[2]);
  CAPTURE(ra);
  CAPTURE(rz);
  CHECK(ra > 3.5);
  CHECK(ra < 4.5);
  CHECK(rz > 3.5);
  CHECK(rz < 4.5);
}

TEST_CASE("neutral eigenmode keeps its modulus over one period") {
  const MarginalPoint& mp = fixture::marginal();
  SimConfig c = small_config();
  c.grid = build_grid(simulation_grid_spec(), fixture::kEta);
  c.nu = mp.nu0;
  c.nonlinear = false;
  c.projection_seed = mp.eigen.lambda;
  c.init.kind = SimInit::Kind::eigenmode;
  c.init.amplitude = 1e-6;
  c.t_end = 2.0 * M_PI / std::abs(mp.omega0);
  c.sample_every = 10.0;
  const AmplitudeTrace tr = NsSimulator(c).run();
  const double a0 = std::abs(tr.amplitude.front());
  for (cd a : tr.amplitude) CHECK(std::abs(std::abs(a) - a0) <= 5e-3 * a0);
}

TEST_CASE("checkpoint round trip") {
  SimConfig c = small_config();
  c.init.kind = SimInit::Kind::noise;
  NsSimulator sim(c);
  SimState s = sim.initial_state();
  for (int i = 0; i < 3; ++i) s = sim.step(s);
  const std::string path = (std::filesystem::temp_directory_path() / "shearhopf_ckpt_test.json").string();
  save_checkpoint(path, s, c);
  const SimState r = load_checkpoint(path, c);
  CHECK(r.t == s.t);
  CHECK(r.steps == s.steps);
  CHECK(r.u0 == s.u0);
  REQUIRE(r.coeffs.size() == s.coeffs.size());
  for (size_t n = 0; n < s.coeffs.size(); ++n) CHECK(r.coeffs[n] == s.coeffs[n]);
  CHECK(sim.step(r).coeffs[0] == sim.step(s).coeffs[0]);
  SimConfig other = c;
  other.nu *= 2.0;
  CHECK_THROWS_AS(load_checkpoint(path, other), InvalidParameter);
  std::filesystem::remove(path);
}

TEST_CASE("trace CSV layout") {
  SimConfig c = small_config();
  const AmplitudeTrace tr = NsSimulator(c).run();
  const std::string path = (std::filesystem::temp_directory_path() / "shearhopf_trace_test.csv").string();
  write_trace_csv(tr, path);
  std::ifstream is(path);
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,re_A,im_A,abs_A,zero_mode_norm,oscillatory_norm");
  int rows = 0;
  for (std::string line; std::getline(is, line);) ++rows;
  CHECK(rows == static_cast<int>(tr.times.size()));
  std::filesystem::remove(path);
}

TEST_CASE("zero-mode decay probe") {
  SimConfig c = small_config();
  c.init.kind = SimInit::Kind::none;
  CHECK(zero_mode_decay_probe(c, {.full_time = 10.0}).trivial);

  // Pure diffusion of a zero-mode bump: the heat-equation tail is algebraic.
  c.init.kind = SimInit::Kind::none;
  c.init.zero_mode_amplitude = 1e-3;
  c.init.zero_mode_width = 1.0;
  c.nonlinear = false;
  c.grid = build_grid(simulation_grid_spec(), fixture::kEta);
  const ZeroModeDecayReport r = zero_mode_decay_probe(c, {.full_time = 10.0});
  CHECK_FALSE(r.trivial);
  CHECK(r.algebraic_better);
  CHECK(r.alg_residual < r.exp_residual);
}
