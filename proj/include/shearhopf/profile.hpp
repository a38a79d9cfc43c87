#pragma once

#include <functional>
#include <string>
#include <vector>

namespace shearhopf {

// Parallel base flow U = (u(y), 0) over a no-slip wall at y = 0.
struct ShearProfile {
  std::string name;
  std::function<double(double)> u;
  std::function<double(double)> du;
  std::function<double(double)> d2u;
  double u_plus = 1.0;  // limit of u as y -> infinity
  double gamma = 1.0;   // decay rate of u - u_plus and its derivatives
};

ShearProfile make_exponential();
ShearProfile make_tanh(double scale);

// Looks up a registered profile: "exponential" or "tanh" (scale used by tanh).
ShearProfile make_profile(const std::string& name, double scale = 1.0);
std::vector<std::string> profile_names();

struct DiagnosticsReport {
  bool pass = true;
  double envelope_bound = 0.0;  // max of e^{gamma y}(|u-u+| + |u'| + |u''|)
  std::vector<std::string> reasons;
};

DiagnosticsReport validate_profile(const ShearProfile& p, double y_max, int n_samples);

}  // namespace shearhopf
