#include <cmath>
#include <random>

#include "doctest.h"
#include "shearhopf/errors.hpp"
#include "shearhopf/grid.hpp"
#include "shearhopf/ode.hpp"

using namespace shearhopf;

namespace {

ModeFunction sample(const GridPtr& g, double eta, const std::function<cd(double)>& f) {
  ModeFunction m = ModeFunction::zeros(g, 1, eta);
  for (int j = 0; j < g->n_points; ++j) m.values(j) = f(g->nodes(j));
  return m;
}

double max_abs(const Eigen::VectorXcd& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("grid endpoints and ordering") {
  const GridPtr g = build_grid(20.0, 64, 2.0);
  REQUIRE(g->n_points == 64);
  CHECK(g->nodes(0) == 0.0);
  CHECK(g->nodes(63) == doctest::Approx(20.0).epsilon(1e-14));
  for (int j = 1; j < 64; ++j) CHECK(g->nodes(j) > g->nodes(j - 1));
}

TEST_CASE("grid clusters nodes at the wall") {
  const GridPtr g = build_grid(20.0, 128, 2.0);
  const double wall = g->nodes(1) - g->nodes(0);
  const double top = g->nodes(127) - g->nodes(126);
  CHECK(wall < top / 4.0);
}

TEST_CASE("weak stretching falls back with a warning") {
  const GridPtr g = build_grid(20.0, 16, 1.0);
  CHECK_FALSE(g->warnings.empty());
  const double ratio = (g->nodes(15) - g->nodes(14)) / (g->nodes(1) - g->nodes(0));
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("grid parameter errors") {
  CHECK_THROWS_AS(build_grid(0.0, 64, 2.0), InvalidParameter);
  CHECK_THROWS_AS(build_grid(20.0, 8, 2.0), InvalidParameter);
  CHECK_THROWS_AS(build_grid(GridSpec{64, 0.3, 0.0}, 0.0), InvalidParameter);
}

TEST_CASE("spectral derivatives of exponentials") {
  const GridPtr g = build_grid(GridSpec{128, 1.0, 40.0}, 0.0);
  const ModeFunction f = sample(g, 0.0, [](double y) { return std::exp(-y); });
  const ModeFunction df = derivative(f, 1);
  double err = 0.0;
  for (int j = 0; j < g->n_points; ++j) err = std::max(err, std::abs(df.values(j) + std::exp(-g->nodes(j))));
  CHECK(err <= 1e-8);

  const ModeFunction h = sample(g, 0.0, [](double y) { return std::exp(-2.0 * y); });
  const ModeFunction d2h = derivative(h, 2);
  err = 0.0;
  for (int j = 0; j < g->n_points; ++j) err = std::max(err, std::abs(d2h.values(j) - 4.0 * std::exp(-2.0 * g->nodes(j))));
  CHECK(err / 4.0 <= 1e-7);

  const ModeFunction zero = ModeFunction::zeros(g, 1, 0.0);
  CHECK(max_abs(derivative(zero, 2).values) == 0.0);
  CHECK_THROWS_AS(derivative(f, 3), InvalidParameter);
}

TEST_CASE("first derivative applied twice matches the second derivative") {
  const GridPtr g = build_grid(GridSpec{128, 1.0, 40.0}, 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-1.0, 1.0), r(0.5, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    const cd a(c(rng), c(rng)), b(c(rng), c(rng));
    const double ra = r(rng), rb = r(rng);
    const ModeFunction f = sample(g, 0.0, [&](double y) { return a * y * std::exp(-ra * y) + b * std::exp(-rb * y); });
    const ModeFunction dd = derivative(derivative(f, 1), 1);
    const ModeFunction d2 = derivative(f, 2);
    CHECK(max_abs(dd.values - d2.values) <= 1e-6 * max_abs(d2.values));
  }
}

TEST_CASE("quadrature and cumulative integration") {
  const GridPtr g = build_grid(GridSpec{193, 0.3, 0.0}, 0.081);
  CHECK(g->weights.sum() == doctest::Approx(g->y_max).epsilon(1e-6));
  Eigen::VectorXd f(g->n_points), exact(g->n_points);
  for (int j = 0; j < g->n_points; ++j) {
    f(j) = std::exp(-g->nodes(j));
    exact(j) = 1.0 - std::exp(-g->nodes(j));
  }
  CHECK((g->integ * f - exact).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("weighted inner product") {
  const GridPtr g = build_grid(GridSpec{128, 1.0, 20.0}, 0.0);
  VelocityMode u = VelocityMode::zeros(g, 1, 0.5, 0.0);
  for (int j = 0; j < g->n_points; ++j) u.vx.values(j) = std::exp(-g->nodes(j));
  CHECK(std::abs(weighted_inner(u, u) - 0.5) <= 1e-8);

  VelocityMode v = VelocityMode::zeros(g, 1, 0.5, 0.0);
  for (int j = 0; j < g->n_points; ++j) {
    const double y = g->nodes(j);
    u.vy.values(j) = cd(0.3, -1.0) * y * std::exp(-y);
    v.vx.values(j) = cd(1.0, 2.0) * std::exp(-0.5 * y);
    v.vy.values(j) = cd(-0.2, 0.1) * std::exp(-3.0 * y);
  }
  const cd uu = weighted_inner(u, u);
  CHECK(uu.real() >= 0.0);
  CHECK(std::abs(uu.imag()) <= 1e-14 * uu.real());
  CHECK(std::abs(weighted_inner(u, v) - std::conj(weighted_inner(v, u))) <= 1e-14);

  const GridPtr other = build_grid(GridSpec{64, 1.0, 20.0}, 0.0);
  CHECK_THROWS_AS(weighted_inner(u, VelocityMode::zeros(other, 1, 0.5, 0.0)), InvalidParameter);
}

TEST_CASE("weighted decay invariant") {
  const GridPtr g = build_grid(GridSpec{128, 1.0, 0.0}, 0.1);
  CHECK(sample(g, 0.1, [](double y) { return std::exp(-0.5 * y); }).decays());
  CHECK_FALSE(sample(g, 0.1, [](double y) { return std::exp(-0.05 * y); }).decays());
}

TEST_CASE("ODE marcher closed forms") {
  Eigen::VectorXcd one(1);
  one << 1.0;
  const double tol = 1e-10;
  const OdeRhs decay = [](double, const Eigen::VectorXcd& z, Eigen::VectorXcd& dz) { dz = -z; };
  CHECK(std::abs(integrate_ode(decay, 0.0, 1.0, one, tol).state(0) - std::exp(-1.0)) <= 10 * tol);

  const OdeRhs rot = [](double, const Eigen::VectorXcd& z, Eigen::VectorXcd& dz) { dz = cd(0.0, 1.0) * z; };
  const OdeResult r = integrate_ode(rot, 0.0, M_PI, one, tol);
  CHECK(std::abs(r.state(0) + 1.0) <= 10 * tol);
  CHECK(r.steps > 0);

  CHECK(integrate_ode(decay, 0.0, 1.0, Eigen::VectorXcd::Zero(1), tol).state(0) == cd(0.0));
  CHECK_THROWS_AS(integrate_ode(decay, 0.0, 1.0, one, 0.0), InvalidParameter);
}

TEST_CASE("ODE marcher is reversible on a linear system") {
  Eigen::MatrixXcd a(3, 3);
  a << cd(-1, 0.5), 2, 0, 0.3, cd(0, -1), 1, cd(0.2, 0.2), 0, -0.5;
  const OdeRhs rhs = [&](double, const Eigen::VectorXcd& z, Eigen::VectorXcd& dz) { dz = a * z; };
  Eigen::VectorXcd z0(3);
  z0 << cd(1, 0), cd(0, 1), cd(-0.5, 0.25);
  const double tol = 1e-10;
  const Eigen::VectorXcd z1 = integrate_ode(rhs, 0.0, 1.0, z0, tol).state;
  const Eigen::VectorXcd back = integrate_ode(rhs, 1.0, 0.0, z1, tol).state;
  CHECK((back - z0).norm() <= 10 * tol * z0.norm());
}

TEST_CASE("ODE marcher reports blow-up as stiffness") {
  Eigen::VectorXcd one(1);
  one << 1.0;
  const OdeRhs blow = [](double, const Eigen::VectorXcd& z, Eigen::VectorXcd& dz) { dz = z.cwiseProduct(z); };
  try {
    integrate_ode(blow, 0.0, 2.0, one, 1e-10);
    FAIL("expected a stiffness error");
  } catch (const StiffnessError& e) {
    CHECK(e.last_y > 0.9);
    CHECK(e.last_y < 1.0 + 1e-6);
  }
}
