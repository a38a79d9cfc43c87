#include "shearhopf/profile.hpp"

#include <cmath>

#include "shearhopf/errors.hpp"

namespace shearhopf {

ShearProfile make_exponential() {
  ShearProfile p;
  p.name = "exponential";
  p.u = [](double y) { return -std::expm1(-y); };
  p.du = [](double y) { return std::exp(-y); };
  p.d2u = [](double y) { return -std::exp(-y); };
  p.u_plus = 1.0;
  p.gamma = 1.0;
  return p;
}

ShearProfile make_tanh(double scale) {
  if (!(scale > 0.0)) throw InvalidParameter("tanh profile: scale must be positive");
  ShearProfile p;
  p.name = "tanh";
  p.u = [scale](double y) { return std::tanh(y / scale); };
  p.du = [scale](double y) {
    double c = std::cosh(y / scale);
    return 1.0 / (scale * c * c);
  };
  p.d2u = [scale](double y) {
    double c = std::cosh(y / scale);
    return -2.0 * std::tanh(y / scale) / (scale * scale * c * c);
  };
  p.u_plus = 1.0;
  p.gamma = 2.0 / scale;
  return p;
}

ShearProfile make_profile(const std::string& name, double scale) {
  if (name == "exponential") return make_exponential();
  if (name == "tanh") return make_tanh(scale);
  throw InvalidParameter("unknown profile '" + name + "'");
}

std::vector<std::string> profile_names() { return {"exponential", "tanh"}; }

namespace {

// Centered difference check with a floor so that far-field values near
// roundoff do not count as mismatches.
bool derivative_consistent(const std::function<double(double)>& f,
                           const std::function<double(double)>& df, double y, double scale) {
  const double h = 1e-4 * std::max(1.0, std::abs(y) * 1e-2);
  double fd = (f(y + h) - f(y - h)) / (2.0 * h);
  double ref = df(y);
  return std::abs(fd - ref) <= 1e-6 * std::abs(ref) + 1e-10 * scale;
}

}  // namespace

DiagnosticsReport validate_profile(const ShearProfile& p, double y_max, int n_samples) {
  DiagnosticsReport rep;
  if (!(y_max > 0.0) || n_samples < 8) {
    rep.pass = false;
    rep.reasons.push_back("invalid sampling parameters");
    return rep;
  }
  if (p.u(0.0) != 0.0) {
    rep.pass = false;
    rep.reasons.push_back("nonzero wall value");
  }
  double scale = std::abs(p.du(0.0)) + 1.0;
  bool du_ok = true, d2u_ok = true;
  for (int i = 0; i < n_samples; ++i) {
    double y = y_max * i / (n_samples - 1);
    double env = std::exp(p.gamma * y) *
                 (std::abs(p.u(y) - p.u_plus) + std::abs(p.du(y)) + std::abs(p.d2u(y)));
    if (!std::isfinite(env)) {
      rep.envelope_bound = env;
      break;
    }
    rep.envelope_bound = std::max(rep.envelope_bound, env);
    if (i > 0 && i + 1 < n_samples) {
      du_ok = du_ok && derivative_consistent(p.u, p.du, y, scale);
      d2u_ok = d2u_ok && derivative_consistent(p.du, p.d2u, y, scale);
    }
  }
  // Non-exploding: the weighted envelope may not exceed its wall value by more
  // than a fixed factor. A gamma larger than the true decay rate fails here.
  double wall = std::abs(p.u(0.0) - p.u_plus) + std::abs(p.du(0.0)) + std::abs(p.d2u(0.0));
  if (!std::isfinite(rep.envelope_bound) || rep.envelope_bound > 1e3 * (wall + 1.0)) {
    rep.pass = false;
    rep.reasons.push_back("weighted envelope not bounded");
  }
  if (!du_ok) {
    rep.pass = false;
    rep.reasons.push_back("du inconsistent with u");
  }
  if (!d2u_ok) {
    rep.pass = false;
    rep.reasons.push_back("d2u inconsistent with du");
  }
  return rep;
}

}  // namespace shearhopf
