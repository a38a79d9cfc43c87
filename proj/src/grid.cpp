#include "shearhopf/grid.hpp"

#include <cmath>
#include <numbers>

#include "shearhopf/errors.hpp"

namespace shearhopf {

namespace {

// Clenshaw-Curtis weights on [-1, 1] for the Gauss-Lobatto points.
Eigen::VectorXd clenshaw_curtis(int n) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
  const double pi = std::numbers::pi;
  for (int j = 0; j <= n; ++j) {
    double theta = pi * j / n;
    double s = 0.0;
    for (int k = 1; k <= n / 2; ++k) {
      double bk = (2 * k == n) ? 1.0 : 2.0;
      s += bk * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
    }
    double cj = (j == 0 || j == n) ? 1.0 : 2.0;
    w(j) = cj / n * (1.0 - s);
  }
  return w;
}

// Chebyshev cumulative integral from -1 on the nodes x, acting on nodal values.
Eigen::MatrixXd cumulative_integration(const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size()) - 1;
  Eigen::VectorXd th = x.array().max(-1.0).min(1.0).acos();
  auto cheb = [&](int k) -> Eigen::VectorXd { return (k * th.array()).cos(); };
  Eigen::MatrixXd vand(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) vand.col(k) = cheb(k);
  // Antiderivative of T_k evaluated on the nodes, minus its value at -1.
  Eigen::MatrixXd anti(n + 1, n + 1);
  auto at_minus_one = [](int k) { return (k % 2 == 0) ? 1.0 : -1.0; };
  for (int k = 0; k <= n; ++k) {
    Eigen::VectorXd col;
    double left;
    if (k == 0) {
      col = cheb(1);
      left = -1.0;
    } else if (k == 1) {
      col = cheb(2) / 4.0;
      left = 0.25;
    } else {
      col = cheb(k + 1) / (2.0 * (k + 1)) - cheb(k - 1) / (2.0 * (k - 1));
      left = at_minus_one(k + 1) / (2.0 * (k + 1)) - at_minus_one(k - 1) / (2.0 * (k - 1));
    }
    anti.col(k) = col.array() - left;
  }
  Eigen::MatrixXd out = anti * vand.partialPivLu().inverse();
  out.row(0).setZero();
  return out;
}

}  // namespace

double stretch_for_median(double y_max, double y_half) {
  if (!(y_half > 0.0) || !(y_half < y_max / 2.0))
    throw InvalidParameter("median node must lie in (0, y_max/2)");
  return y_max / (2.0 * y_half);
}

GridPtr build_grid(double y_max, int n_points, double stretch) {
  if (!(y_max > 0.0)) throw InvalidParameter("build_grid: y_max must be positive");
  if (n_points < 16) throw InvalidParameter("build_grid: need at least 16 points");
  if (!(stretch >= 1.0) || !std::isfinite(stretch))
    throw InvalidParameter("build_grid: stretch must be >= 1");

  auto g = std::make_shared<HalfLineGrid>();
  if (stretch < kMinStretch) {
    g->warnings.push_back("stretch " + std::to_string(stretch) +
                          " leaves the wall under-resolved; using " + std::to_string(kMinStretch));
    stretch = kMinStretch;
  }
  const int n = n_points - 1;
  const double pi = std::numbers::pi;
  g->n_points = n_points;
  g->y_max = y_max;
  g->stretch = stretch;
  const double b = stretch / (stretch - 1.0);
  const double a = y_max * (b - 1.0) / 2.0;
  g->map_a = a;
  g->map_b = b;

  Eigen::VectorXd x(n + 1);
  for (int j = 0; j <= n; ++j) x(j) = -std::cos(pi * j / n);
  x(0) = -1.0;
  x(n) = 1.0;
  g->xi = x;

  // Chebyshev differentiation in x with the negative-sum diagonal.
  Eigen::MatrixXd dx = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) {
    double ci = (i == 0 || i == n) ? 2.0 : 1.0;
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      double cj = (j == 0 || j == n) ? 2.0 : 1.0;
      double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      dx(i, j) = (ci / cj) * sgn / (x(i) - x(j));
    }
  }
  for (int i = 0; i <= n; ++i) dx(i, i) = -dx.row(i).sum();

  Eigen::VectorXd y(n + 1), dydx(n + 1), d2ydx2(n + 1);
  for (int j = 0; j <= n; ++j) {
    double den = b - x(j);
    y(j) = a * (1.0 + x(j)) / den;
    dydx(j) = a * (1.0 + b) / (den * den);
    d2ydx2(j) = 2.0 * a * (1.0 + b) / (den * den * den);
  }
  y(0) = 0.0;
  y(n) = y_max;
  g->nodes = y;

  Eigen::VectorXd inv1 = dydx.cwiseInverse();
  g->d1 = inv1.asDiagonal() * dx;
  Eigen::MatrixXd dxx = dx * dx;
  Eigen::VectorXd inv2 = inv1.cwiseProduct(inv1);
  Eigen::VectorXd corr = d2ydx2.cwiseProduct(inv2).cwiseProduct(inv1);
  g->d2 = inv2.asDiagonal() * dxx - corr.asDiagonal() * dx;

  g->weights = clenshaw_curtis(n).cwiseProduct(dydx);
  g->integ = cumulative_integration(x) * dydx.asDiagonal();
  return g;
}

GridPtr build_grid(const GridSpec& spec, double eta) {
  if (!(eta > 0.0) && !(spec.y_max > 0.0)) throw InvalidParameter("build_grid: need eta > 0 or an explicit y_max");
  const double y_max = spec.y_max > 0.0 ? spec.y_max : 25.0 / eta;
  return build_grid(y_max, spec.n_points, stretch_for_median(y_max, spec.y_half));
}

ModeFunction ModeFunction::zeros(const GridPtr& g, int n, double eta) {
  ModeFunction f;
  f.n = n;
  f.eta = eta;
  f.grid = g;
  f.values = Eigen::VectorXcd::Zero(g->n_points);
  return f;
}

double ModeFunction::weighted_sup() const {
  double m = 0.0;
  for (int j = 0; j < values.size(); ++j)
    m = std::max(m, std::abs(values(j)) * std::exp(eta * grid->nodes(j)));
  return m;
}

bool ModeFunction::decays(double tol) const {
  const int np = static_cast<int>(values.size());
  const int start = np - std::max(2, np / 10);
  double inner = 0.0, outer = 0.0;
  for (int j = 0; j < np; ++j) {
    double w = std::abs(values(j)) * std::exp(eta * grid->nodes(j));
    if (j < start)
      inner = std::max(inner, w);
    else
      outer = std::max(outer, w);
  }
  return outer <= inner * (1.0 + tol) + tol * inner + 1e-300;
}

VelocityMode VelocityMode::zeros(const GridPtr& g, int n, double alpha, double eta) {
  VelocityMode v;
  v.vx = ModeFunction::zeros(g, n, eta);
  v.vy = ModeFunction::zeros(g, n, eta);
  v.alpha = alpha;
  return v;
}

double VelocityMode::divergence_sup() const {
  Eigen::VectorXcd div = cd(0.0, n() * alpha) * vx.values + grid()->d1 * vy.values;
  return div.cwiseAbs().maxCoeff();
}

VelocityMode VelocityMode::conj() const {
  VelocityMode c = *this;
  c.vx.n = -vx.n;
  c.vy.n = -vy.n;
  c.vx.values = vx.values.conjugate();
  c.vy.values = vy.values.conjugate();
  return c;
}

VelocityMode VelocityMode::scaled(cd s) const {
  VelocityMode c = *this;
  c.vx.values *= s;
  c.vy.values *= s;
  return c;
}

ModeFunction derivative(const ModeFunction& f, int order) {
  if (order != 1 && order != 2) throw InvalidParameter("derivative: order must be 1 or 2");
  ModeFunction r = f;
  r.values = (order == 1 ? f.grid->d1 : f.grid->d2) * f.values;
  return r;
}

cd weighted_inner(const VelocityMode& u, const VelocityMode& v) {
  if (u.grid() != v.grid() && (u.grid()->n_points != v.grid()->n_points ||
                               u.grid()->nodes != v.grid()->nodes))
    throw InvalidParameter("weighted_inner: grid mismatch");
  const Eigen::VectorXd& w = u.grid()->weights;
  cd s = 0.0;
  for (int j = 0; j < w.size(); ++j)
    s += w(j) * (u.vx.values(j) * std::conj(v.vx.values(j)) +
                 u.vy.values(j) * std::conj(v.vy.values(j)));
  return s;
}

double l2_norm(const VelocityMode& u) { return std::sqrt(std::max(0.0, weighted_inner(u, u).real())); }

}  // namespace shearhopf
