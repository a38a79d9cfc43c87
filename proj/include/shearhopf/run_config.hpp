#pragma once

#include <string>
#include <vector>

#include "shearhopf/grid.hpp"
#include "shearhopf/profile.hpp"
#include "shearhopf/spectral_regions.hpp"

namespace shearhopf {

// Plain-text configuration: "[section]" headers and "key = value" lines,
// '#' starts a comment. Every key is listed in config_schema(); anything
// else is rejected.
struct RunConfig {
  // [profile]
  std::string profile = "exponential";
  double profile_scale = 1.0;
  // [grid]
  GridSpec grid;
  // [solver]
  double eta = 0.0;  // 0 selects 0.45 alpha
  double tol = 1e-10;
  double consistency_tol = 1e-6;
  double adjoint_tol = 1e-3;
  // [marginal]
  double alpha = 0.18;
  double nu_lo = 6.25e-6;
  double nu_hi = 9.09e-6;
  double seed_re = 0.0;  // both zero: seed from the discrete operator
  double seed_im = 0.0;
  // [spectrum]
  double nu = 0.0;  // 0 selects nu_hi
  int seeds_re = 8;
  int seeds_im = 8;
  // [neutral]
  double alpha_lo = 0.16;
  double alpha_hi = 0.185;
  int branch_points = 5;
  // [simulate]
  std::string sim_seed = "wave";  // wave, eigenmode or noise
  double epsilon = 7e-4;
  double sim_nu = 0.0;            // 0 selects nu0 + mu2 eps^2 for a wave seed, nu0 otherwise
  double amplitude = 1e-3;        // eigenmode or noise seed
  int n_modes = 8;
  int sim_points = 128;
  double sim_y_half = 2.0;
  double dt = 2.0;
  double t_end = 20000.0;
  double sample_every = 50.0;
  unsigned long noise_seed = 1;
  // [regions]
  double re_min = -0.05;
  double im_max = 0.3;
  int region_samples = 200;
  // [output]
  std::string out_dir = "out";

  double eta_value() const { return eta > 0.0 ? eta : 0.45 * alpha; }
  ShearProfile make_profile() const;
  GridPtr make_grid() const;
  GridPtr make_sim_grid() const;
  // Sets "section.key" from text; throws InvalidParameter for unknown keys or bad values.
  void set(const std::string& dotted_key, const std::string& value);
  void validate() const;
  // Canonical text of every key, in schema order.
  std::string dump() const;
  std::string hash() const;
};

struct ConfigKey {
  std::string key;  // "section.key"
  std::string help;
};
const std::vector<ConfigKey>& config_schema();

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

}  // namespace shearhopf
