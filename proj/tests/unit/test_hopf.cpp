#include <cmath>
#include <random>

#include "doctest.h"
#include "fixture.hpp"
#include "shearhopf/errors.hpp"
#include "shearhopf/hopf.hpp"

using namespace shearhopf;

namespace {

struct Coefficients {
  AdjointPair adj;
  HopfFields fields;
  HopfReport report;
};

const Coefficients& coefficients() {
  static const Coefficients c = [] {
    Coefficients r;
    const MarginalPoint& mp = fixture::marginal();
    r.adj = adjoint_eigenfunction(mp.eigen, mp.params);
    r.report = compute_coefficients(mp, r.adj, {}, &r.fields);
    return r;
  }();
  return c;
}

double sup(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }

VelocityMode minus(VelocityMode a, const VelocityMode& b) {
  a.vx.values -= b.vx.values;
  a.vy.values -= b.vy.values;
  return a;
}

VelocityMode random_mode(const GridPtr& g, int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0), r(0.3, 2.0);
  VelocityMode u = VelocityMode::zeros(g, n, fixture::kAlpha, fixture::kEta);
  for (int term = 0; term < 3; ++term) {
    const cd cx(c(rng), c(rng)), cy(c(rng), c(rng));
    const double gx = r(rng), gy = r(rng);
    for (int j = 0; j < g->n_points; ++j) {
      const double y = g->nodes(j);
      u.vx.values(j) += cx * std::pow(y, term) * std::exp(-gx * y);
      u.vy.values(j) += cy * std::pow(y, term) * std::exp(-gy * y);
    }
  }
  return u;
}

}  // namespace

TEST_CASE("zero-mode projection keeps the x-component") {
  const GridPtr& g = fixture::grid();
  VelocityMode u = VelocityMode::zeros(g, 0, fixture::kAlpha, 0.0);
  for (int j = 0; j < g->n_points; ++j) {
    u.vx.values(j) = std::exp(-g->nodes(j));
    u.vy.values(j) = g->nodes(j) * std::exp(-g->nodes(j));
  }
  const VelocityMode p = project_zero_mode(u);
  CHECK(p.vx.values == u.vx.values);
  CHECK(sup(p.vy.values) == 0.0);
  CHECK(project_zero_mode(p).vx.values == p.vx.values);
  CHECK(sup(project_zero_mode(VelocityMode::zeros(g, 0, fixture::kAlpha, 0.0)).vx.values) == 0.0);
}

TEST_CASE("Helmholtz projection") {
  const GridPtr& g = fixture::grid();
  const MarginalPoint& mp = fixture::marginal();
  const VelocityMode z = eigenfunction_velocity(mp.eigen, mp.params);
  CHECK(l2_norm(minus(helmholtz_project(z), z)) <= 1e-8 * l2_norm(z));

  VelocityMode grad = VelocityMode::zeros(g, 2, fixture::kAlpha, fixture::kEta);
  for (int j = 0; j < g->n_points; ++j) {
    const double y = g->nodes(j);
    grad.vx.values(j) = cd(0.0, 2.0 * fixture::kAlpha) * y * y * std::exp(-y);
    grad.vy.values(j) = (2.0 * y - y * y) * std::exp(-y);
  }
  CHECK(l2_norm(helmholtz_project(grad)) <= 1e-8 * l2_norm(grad));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const VelocityMode pu = helmholtz_project(random_mode(g, 1 + trial % 3, rng));
    CHECK(l2_norm(minus(helmholtz_project(pu), pu)) <= 1e-8 * l2_norm(pu));
    CHECK(std::abs(pu.vy.values(0)) <= 1e-10 * sup(pu.vy.values));
  }
}

TEST_CASE("bilinear term") {
  const GridPtr& g = fixture::grid();
  const MarginalPoint& mp = fixture::marginal();
  const VelocityMode z = eigenfunction_velocity(mp.eigen, mp.params);
  const VelocityMode zb = z.conj();

  VelocityMode a = VelocityMode::zeros(g, 0, fixture::kAlpha, 0.0), b = a;
  for (int j = 0; j < g->n_points; ++j) {
    a.vx.values(j) = 1.0 - std::exp(-g->nodes(j));
    b.vx.values(j) = std::sin(g->nodes(j)) * std::exp(-g->nodes(j));
  }
  CHECK(sup(bilinear_B(a, b).vx.values) == 0.0);
  CHECK(sup(bilinear_B(a, b).vy.values) == 0.0);

  CHECK(l2_norm(minus(bilinear_B(z, zb), bilinear_B(zb, z))) <= 1e-14 * l2_norm(bilinear_B(z, zb)));
  CHECK(bilinear_B(z, z).n() == 2);
  CHECK(bilinear_B(z, zb).n() == 0);

  const VelocityMode modal = bilinear_B(z, zb);
  const VelocityMode sampled = advection_product_sampled(z, zb, 64);
  CHECK(sup(modal.vx.values - sampled.vx.values) <= 1e-9 * sup(modal.vx.values));
}

TEST_CASE("zero-mode inverse") {
  const GridPtr& g = fixture::grid();
  ModeFunction f = ModeFunction::zeros(g, 0, 0.0);
  for (int j = 0; j < g->n_points; ++j) f.values(j) = std::exp(-g->nodes(j));
  const VelocityMode v = l0_inverse(f, 1.0);
  double err = 0.0;
  for (int j = 0; j < g->n_points; ++j) err = std::max(err, std::abs(v.vx.values(j) + 1.0 - std::exp(-g->nodes(j))));
  CHECK(err <= 1e-8);
  CHECK(v.vx.values(g->n_points - 1).real() == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(v.vx.values(0) == cd(0.0));
  CHECK(sup(v.vy.values) == 0.0);
  CHECK(sup(l0_inverse(ModeFunction::zeros(g, 0, 0.0), 1.0).vx.values) == 0.0);

  ModeFunction flat = ModeFunction::zeros(g, 0, 0.0);
  flat.values.setOnes();
  CHECK_THROWS_AS(l0_inverse(flat, 1.0), NumericalError);
}

TEST_CASE("coefficient relations") {
  const HopfReport& r = coefficients().report;
  const cd cmb = r.c - r.b;
  CHECK(std::abs(r.mu2 * r.d_pair.real() - cmb.real()) <= 1e-12 * std::abs(cmb.real()));
  CHECK(r.sigma_coeff == doctest::Approx(2.0 * (r.b - r.c).real()).epsilon(1e-15));
  CHECK(r.supercritical == (r.mu2 > 0.0));
  CHECK(r.verdict() == (r.supercritical ? "supercritical" : "subcritical"));
  CHECK(r.cross_checks.b_rel_diff <= 1e-6);
  CHECK(r.cross_checks.c_rel_diff <= 1e-6);
  CHECK(r.cross_checks.adjoint_rel_diff <= 1e-4);
  CHECK(r.d_pair.real() > 0.0);
}

TEST_CASE("second-order fields") {
  const HopfFields& f = coefficients().fields;
  CHECK(sup(f.v20.vy.values) == 0.0);
  CHECK(f.v20.vx.values(0) == cd(0.0));
  CHECK(f.w22.n() == 2);
  CHECK(f.w22.solenoidal);
  CHECK(f.w22.no_slip);
  CHECK(f.w22.divergence_sup() <= 1e-8 * sup(f.w22.vx.values));
  const auto& cc = coefficients().report.cross_checks;
  CHECK(std::abs(cc.v20_limit - cc.v20_limit_formula) <= 1e-6 * std::abs(cc.v20_limit_formula));

  const MarginalPoint& mp = fixture::marginal();
  HarmonicParams hp;
  hp.alpha = mp.alpha;
  hp.nu = mp.nu0;
  hp.profile = mp.params.profile;
  hp.eta = mp.params.eta;
  const ForcedSolve s = second_harmonic(f.zeta, mp.omega0, hp);
  CHECK(s.residual <= 1e-7);
}

TEST_CASE("coefficients are gauge invariant") {
  const MarginalPoint& mp = fixture::marginal();
  const HopfReport& r = coefficients().report;
  for (double theta : {0.4, 2.0, -1.3}) {
    MarginalPoint turned = mp;
    turned.eigen.psi.values *= std::polar(1.0, theta);
    const HopfReport t = compute_coefficients(turned, adjoint_eigenfunction(turned.eigen, turned.params));
    CHECK(std::abs(t.b - r.b) <= 1e-10 * std::abs(r.b));
    CHECK(std::abs(t.c - r.c) <= 1e-10 * std::abs(r.c));
    CHECK(std::abs(t.mu2 - r.mu2) <= 1e-10 * std::abs(r.mu2));
    CHECK(std::abs(t.omega2 - r.omega2) <= 1e-10 * std::abs(r.omega2));
  }
}

TEST_CASE("assembled wave") {
  const Coefficients& c = coefficients();
  const BifurcatedWave w0 = assemble_wave(c.report, c.fields, 0.0);
  for (int j = 0; j < fixture::grid()->n_points; j += 7) {
    const auto [vx, vy] = w0.sample(0.3, j);
    CHECK(vx == 0.0);
    CHECK(vy == 0.0);
  }
  const double eps = 5e-4;
  const BifurcatedWave w = assemble_wave(c.report, c.fields, eps);
  CHECK(w.mu_of_eps == doctest::Approx(eps * eps * c.report.mu2));
  CHECK(w.omega_of_eps == doctest::Approx(c.report.omega0 + eps * eps * c.report.omega2));
  CHECK(w.harmonic(3).vx.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("traveling-wave residual is third order") {
  const Coefficients& c = coefficients();
  const MarginalPoint& mp = fixture::marginal();
  std::vector<double> ratio;
  for (double eps : {1e-4, 2e-4, 4e-4}) {
    const BifurcatedWave w = assemble_wave(c.report, c.fields, eps, FieldRoute::galerkin);
    ratio.push_back(traveling_wave_residual(w, mp) / (eps * eps * eps));
  }
  const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
  CAPTURE(ratio[0]);
  CAPTURE(ratio[1]);
  CAPTURE(ratio[2]);
  CHECK(*hi <= 2.0 * *lo);
}
