#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "shearhopf/errors.hpp"
#include "shearhopf/hopf.hpp"

namespace shearhopf {

namespace {

// Solves (D + c) v = rhs with v fixed at one end node.
Eigen::VectorXcd first_order_solve(const HalfLineGrid& g, double c, const Eigen::VectorXcd& rhs,
                                   bool pin_left, cd pinned) {
  const int np = g.n_points;
  Eigen::MatrixXcd a = g.d1.cast<cd>();
  a.diagonal().array() += c;
  Eigen::VectorXcd b = rhs;
  const int row = pin_left ? 0 : np - 1;
  a.row(row).setZero();
  a(row, row) = 1.0;
  b(row) = pinned;
  return a.partialPivLu().solve(b);
}

}  // namespace

VelocityMode helmholtz_project(const VelocityMode& u) {
  const int n = u.n();
  if (n == 0) return project_zero_mode(u);
  const HalfLineGrid& g = *u.grid();
  const double k = n * u.alpha;
  const double kap = std::abs(k);
  const double sg = n > 0 ? 1.0 : -1.0;
  const cd isg(0.0, sg);
  const Eigen::VectorXcd& ux = u.vx.values;
  const Eigen::VectorXcd& uy = u.vy.values;
  Eigen::VectorXcd a = uy - isg * ux;
  Eigen::VectorXcd b = uy + isg * ux;
  // I1 = int_0^y a e^{-kap(y-t)} dt, I2 = int_y^inf b e^{-kap(t-y)} dt,
  // I3 = e^{-kap y} int_0^inf b e^{-kap t} dt, each from its defining ODE.
  Eigen::VectorXcd i1 = first_order_solve(g, kap, a, true, 0.0);
  Eigen::VectorXcd i2 = first_order_solve(g, -kap, -b, false, 0.0);
  Eigen::VectorXcd i3(g.n_points);
  for (int j = 0; j < g.n_points; ++j) i3(j) = i2(0) * std::exp(-kap * g.nodes(j));
  Eigen::VectorXcd phi = 0.5 * (i1 - i2 - i3);

  VelocityMode r = u;
  r.vx.values = ux - cd(0.0, k) * phi;
  r.vy.values = 0.5 * kap * (i1 + i2 - i3);
  r.vy.values(0) = 0.0;
  r.solenoidal = true;
  r.no_slip = false;
  return r;
}

VelocityMode project_zero_mode(const VelocityMode& u) {
  VelocityMode r = u;
  r.vy.values.setZero();
  r.solenoidal = true;
  return r;
}

VelocityMode advection_product(const VelocityMode& u, const VelocityMode& v) {
  if (u.grid() != v.grid()) throw InvalidParameter("advection_product: grid mismatch");
  const double alpha = std::max(u.alpha, v.alpha);
  const int n_out = u.n() + v.n();
  const auto& d1 = u.grid()->d1;
  // Zero harmonics carry no y-velocity.
  const Eigen::VectorXcd uy = u.n() == 0 ? Eigen::VectorXcd::Zero(u.vy.values.size()) : u.vy.values;
  const Eigen::VectorXcd vy = v.n() == 0 ? Eigen::VectorXcd::Zero(v.vy.values.size()) : v.vy.values;
  const cd iku(0.0, u.n() * alpha), ikv(0.0, v.n() * alpha);
  Eigen::VectorXcd dvx = d1 * v.vx.values, dvy = d1 * vy;
  Eigen::VectorXcd dux = d1 * u.vx.values, duy = d1 * uy;
  VelocityMode r = VelocityMode::zeros(u.grid(), n_out, alpha, std::min(u.vx.eta, v.vx.eta));
  r.vx.values = -0.5 * (u.vx.values.cwiseProduct(ikv * v.vx.values) + uy.cwiseProduct(dvx) +
                        v.vx.values.cwiseProduct(iku * u.vx.values) + vy.cwiseProduct(dux));
  r.vy.values = -0.5 * (u.vx.values.cwiseProduct(ikv * vy) + uy.cwiseProduct(dvy) +
                        v.vx.values.cwiseProduct(iku * uy) + vy.cwiseProduct(duy));
  return r;
}

VelocityMode bilinear_B(const VelocityMode& u, const VelocityMode& v) {
  VelocityMode f = advection_product(u, v);
  return f.n() == 0 ? project_zero_mode(f) : helmholtz_project(f);
}

VelocityMode advection_product_sampled(const VelocityMode& u, const VelocityMode& v, int n_x) {
  if (u.grid() != v.grid()) throw InvalidParameter("advection_product_sampled: grid mismatch");
  const double alpha = std::max(u.alpha, v.alpha);
  const int nu_ = u.n(), nv = v.n(), n_out = nu_ + nv;
  if (n_x <= 2 * (std::abs(nu_) + std::abs(nv))) throw InvalidParameter("advection_product_sampled: too few x samples");
  const auto& d1 = u.grid()->d1;
  const int np = u.grid()->n_points;
  const Eigen::VectorXcd uy = nu_ == 0 ? Eigen::VectorXcd::Zero(np) : u.vy.values;
  const Eigen::VectorXcd vy = nv == 0 ? Eigen::VectorXcd::Zero(np) : v.vy.values;
  const Eigen::VectorXcd dux = d1 * u.vx.values, duy = d1 * uy;
  const Eigen::VectorXcd dvx = d1 * v.vx.values, dvy = d1 * vy;
  const double period = 2.0 * std::numbers::pi / alpha;
  VelocityMode r = VelocityMode::zeros(u.grid(), n_out, alpha, std::min(u.vx.eta, v.vx.eta));
  for (int m = 0; m < n_x; ++m) {
    const double x = period * m / n_x;
    const cd eu = std::polar(1.0, nu_ * alpha * x), ev = std::polar(1.0, nv * alpha * x);
    const cd eo = std::polar(1.0, -n_out * alpha * x) / double(n_x);
    const cd iku(0.0, nu_ * alpha), ikv(0.0, nv * alpha);
    for (int j = 0; j < np; ++j) {
      // Pointwise fields and their x, y derivatives at (x, y_j).
      const cd ax = u.vx.values(j) * eu, ay = uy(j) * eu;
      const cd ax_x = iku * ax, ay_x = iku * ay, ax_y = dux(j) * eu, ay_y = duy(j) * eu;
      const cd bx = v.vx.values(j) * ev, by = vy(j) * ev;
      const cd bx_x = ikv * bx, by_x = ikv * by, bx_y = dvx(j) * ev, by_y = dvy(j) * ev;
      const cd fx = -0.5 * (ax * bx_x + ay * bx_y + bx * ax_x + by * ax_y);
      const cd fy = -0.5 * (ax * by_x + ay * by_y + bx * ay_x + by * ay_y);
      r.vx.values(j) += fx * eo;
      r.vy.values(j) += fy * eo;
    }
  }
  return r;
}

namespace {

// Tail integrals int_{y_max}^inf f and int_{y_max}^inf s f from a single
// exponential fitted to the outermost nodes.
void exponential_tail(const ModeFunction& f, cd& tail0, cd& tail1) {
  const HalfLineGrid& g = *f.grid;
  const int np = g.n_points;
  tail0 = tail1 = 0.0;
  const double fmax = f.values.cwiseAbs().maxCoeff();
  if (fmax == 0.0) return;
  const cd fend = f.values(np - 1);
  if (std::abs(fend) <= 1e-15 * fmax) return;
  // Least-squares slope of log|f| over the outer nodes spanning about a decade.
  int first = np - 2;
  while (first > np / 2 && std::abs(f.values(first)) < 10.0 * std::abs(fend) &&
         std::abs(f.values(first)) > 0.0)
    --first;
  first = std::max(0, std::min(first, np - 3));
  double sy = 0, sl = 0, syy = 0, syl = 0;
  int cnt = 0;
  for (int j = first; j < np; ++j) {
    double a = std::abs(f.values(j));
    if (a <= 0.0) continue;
    double y = g.nodes(j), l = std::log(a);
    sy += y;
    sl += l;
    syy += y * y;
    syl += y * l;
    ++cnt;
  }
  double slope = (cnt * syl - sy * sl) / (cnt * syy - sy * sy);
  double rate = -slope;
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw NumericalError("l0_inverse: forcing does not decay at the end of the grid");
  const double ym = g.y_max;
  tail0 = fend / rate;
  tail1 = fend * (ym / rate + 1.0 / (rate * rate));
}

}  // namespace

VelocityMode l0_inverse(const ModeFunction& f, double nu0, double alpha) {
  if (!(nu0 > 0.0)) throw InvalidParameter("l0_inverse: nu0 must be positive");
  const HalfLineGrid& g = *f.grid;
  const int np = g.n_points;
  cd tail0, tail1;
  exponential_tail(f, tail0, tail1);
  // F1(y) = int_0^y s f ds; T(y) = int_y^inf f ds.
  Eigen::VectorXcd sf = g.nodes.cast<cd>().cwiseProduct(f.values);
  const Eigen::MatrixXcd j = g.integ.cast<cd>();
  Eigen::VectorXcd f1 = j * sf;
  Eigen::VectorXcd cum = j * f.values;
  Eigen::VectorXcd t = (cum(np - 1) - cum.array()).matrix() + Eigen::VectorXcd::Constant(np, tail0);
  VelocityMode v = VelocityMode::zeros(f.grid, 0, alpha, 0.0);
  v.vx.values = -(f1 + g.nodes.cast<cd>().cwiseProduct(t)) / nu0;
  v.vx.values(0) = 0.0;
  v.solenoidal = true;
  v.no_slip = true;
  (void)tail1;
  return v;
}

VelocityMode l0_inverse_galerkin(const ModeFunction& f, double nu0, double alpha) {
  if (!(nu0 > 0.0)) throw InvalidParameter("l0_inverse_galerkin: nu0 must be positive");
  const HalfLineGrid& g = *f.grid;
  const int np = g.n_points, m = np - 1;
  // Test functions are nodal values with v(0) = 0; v'(y_max) = 0 is natural.
  Eigen::MatrixXd k = g.d1.transpose() * g.weights.asDiagonal() * g.d1;
  Eigen::MatrixXd kr = k.bottomRightCorner(m, m);
  Eigen::VectorXcd rhs = -(g.weights.cast<cd>().cwiseProduct(f.values)).tail(m) / nu0;
  Eigen::VectorXcd sol = kr.cast<cd>().partialPivLu().solve(rhs);
  VelocityMode v = VelocityMode::zeros(f.grid, 0, alpha, 0.0);
  v.vx.values.tail(m) = sol;
  v.solenoidal = true;
  v.no_slip = true;
  return v;
}

}  // namespace shearhopf
