#include "shearhopf/ode.hpp"

#include <cmath>

#include "shearhopf/errors.hpp"

namespace shearhopf {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeResult integrate_ode(const OdeRhs& rhs, double y_from, double y_to,
                        const Eigen::VectorXcd& state0, double tol, int max_steps) {
  if (!(tol > 0.0)) throw InvalidParameter("integrate_ode: tol must be positive");
  if (y_from == y_to) throw InvalidParameter("integrate_ode: empty interval");
  OdeResult res;
  res.state = state0;
  if (state0.cwiseAbs().maxCoeff() == 0.0) return res;

  const double dir = (y_to > y_from) ? 1.0 : -1.0;
  const double span = std::abs(y_to - y_from);
  const long m = state0.size();
  Eigen::VectorXcd k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), tmp(m), z5(m), err(m);

  double y = y_from;
  Eigen::VectorXcd z = state0;
  double h = std::min(span, 1e-2 * span + 1e-3);
  rhs(y, z, k1);
  const double h_min = 1e-14 * std::max(1.0, std::max(std::abs(y_from), std::abs(y_to)));

  while (dir * (y_to - y) > 0.0) {
    if (res.steps + res.rejected > max_steps) throw StiffnessError("integrate_ode: step budget exhausted", y);
    if (h > std::abs(y_to - y)) h = std::abs(y_to - y);
    const double s = dir * h;
    tmp = z + s * a21 * k1;
    rhs(y + c2 * s, tmp, k2);
    tmp = z + s * (a31 * k1 + a32 * k2);
    rhs(y + c3 * s, tmp, k3);
    tmp = z + s * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(y + c4 * s, tmp, k4);
    tmp = z + s * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(y + c5 * s, tmp, k5);
    tmp = z + s * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(y + s, tmp, k6);
    z5 = z + s * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(y + s, z5, k7);
    err = s * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    // Error measured against the vector scale: components of the minor
    // system differ by many orders of magnitude.
    double scale = std::max(z.cwiseAbs().maxCoeff(), z5.cwiseAbs().maxCoeff());
    double en = err.cwiseAbs().maxCoeff() / (tol * scale + 1e-300);
    if (!std::isfinite(en)) en = 1e10;
    if (en <= 1.0) {
      y = (std::abs(y_to - (y + s)) < h_min) ? y_to : y + s;
      z = z5;
      k1 = k7;
      ++res.steps;
      double fac = (en == 0.0) ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2)));
      h *= fac;
    } else {
      ++res.rejected;
      h *= std::max(0.1, 0.9 * std::pow(en, -0.25));
      if (h < h_min) throw StiffnessError("integrate_ode: step size underflow", y);
    }
  }
  res.state = z;
  return res;
}

}  // namespace shearhopf
