#pragma once

#include "shearhopf/grid.hpp"
#include "shearhopf/neutral_curve.hpp"
#include "shearhopf/profile.hpp"

// Marginal point of the exponential profile at alpha = 0.18 on the default
// grid, computed once per test binary.
namespace fixture {

using shearhopf::cd;

inline constexpr double kAlpha = 0.18;
inline constexpr double kEta = 0.45 * kAlpha;

inline const shearhopf::GridPtr& grid() {
  static const shearhopf::GridPtr g = shearhopf::build_grid(shearhopf::GridSpec{}, kEta);
  return g;
}

inline const shearhopf::MarginalPoint& marginal() {
  static const shearhopf::MarginalPoint mp = [] {
    const cd seed(0.0, -0.0224);
    return shearhopf::find_marginal(kAlpha, {7.0e-6, 7.3e-6}, shearhopf::make_exponential(), kEta, grid(), &seed);
  }();
  return mp;
}

inline shearhopf::OSParams params(double nu) {
  shearhopf::OSParams p = marginal().params;
  p.nu = nu;
  return p;
}

}  // namespace fixture
