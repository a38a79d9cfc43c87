#include <cmath>

#include "doctest.h"
#include "shearhopf/errors.hpp"
#include "shearhopf/spectral_regions.hpp"

using namespace shearhopf;

namespace {

RegionParams params() {
  RegionParams rp;
  rp.nu = 0.01;
  rp.alpha = 0.5;
  rp.eta = 0.2;
  rp.u_plus = 1.0;
  return rp;
}

}  // namespace

TEST_CASE("classifier examples") {
  const RegionParams rp = params();
  const int n = 2;
  const cd p1(-rp.nu * rp.alpha * rp.alpha * n * n, n * rp.alpha * rp.u_plus);
  CHECK(in_sigma_uplus(p1, rp));
  CHECK(in_sigma_uplus(std::conj(p1), rp));
  CHECK_FALSE(in_sigma_uplus(1.0, rp));
  CHECK_FALSE(in_sigma_uplus(-rp.nu * (rp.alpha * rp.alpha - rp.eta * rp.eta) / 2.0, rp));
}

TEST_CASE("classifier is monotone in the real part") {
  const RegionParams rp = params();
  for (double im = -3.0; im <= 3.0; im += 0.25) {
    bool prev = in_sigma_uplus(cd(0.5, im), rp);
    for (double re = 0.5; re >= -3.0; re -= 0.01) {
      const bool now = in_sigma_uplus(cd(re, im), rp);
      CHECK((now || !prev));
      prev = now;
    }
  }
}

TEST_CASE("traveling-frame variant") {
  RegionParams rp = params();
  CHECK_THROWS_AS(in_sigma_uplus_omega(cd(-1.0, 0.0), rp), InvalidParameter);
  rp.omega = 0.0;
  for (double re = -2.0; re <= 0.2; re += 0.05)
    for (double im = -2.0; im <= 2.0; im += 0.1) CHECK(in_sigma_uplus_omega(cd(re, im), rp) == in_sigma_uplus(cd(re, im), rp));
  RegionParams wide = params();
  wide.omega = 0.3;
  for (double re = -2.0; re <= 0.0; re += 0.05)
    for (double im : {-4.0, -3.0, 3.0, 4.0})
      if (in_sigma_uplus(cd(re, im), rp)) CHECK(in_sigma_uplus_omega(cd(re, im), wide));
  for (double re : {-rp.nu * rp.alpha * rp.alpha, -0.1, -1.0}) CHECK(in_sigma_uplus_omega(cd(re, 0.0), wide));
}

TEST_CASE("gamma contour") {
  const RegionParams rp = params();
  const Contour c = build_gamma_contour(rp, 1e-3, 1.5e-3, 0.5, 0.05, 1e-3);
  REQUIRE_FALSE(c.vertices.empty());
  CHECK(c.vertices.front().real() == doctest::Approx(1e-3));
  CHECK(c.vertices.front().imag() == 0.0);
  for (cd v : c.vertices) CHECK_FALSE(in_sigma_uplus(v, rp));
  // every vertex has its mirror image
  for (cd v : c.vertices) {
    bool found = false;
    for (cd w : c.vertices) found = found || std::abs(w - std::conj(v)) <= 1e-14;
    CHECK(found);
  }
  CHECK_THROWS_AS(build_gamma_contour(rp, 0.1, 0.05, 0.5), InvalidParameter);
}

TEST_CASE("region parameters are validated") {
  RegionParams rp = params();
  rp.eta = rp.alpha;
  CHECK_THROWS_AS(rp.validate(), InvalidParameter);
  rp = params();
  rp.nu = 0.0;
  CHECK_THROWS_AS(rp.validate(), InvalidParameter);
}

TEST_CASE("boundary polylines sit on the region edge") {
  const RegionParams rp = params();
  const auto lines = region_boundary(rp, -1.0, 2.0, 100);
  REQUIRE_FALSE(lines.empty());
  for (const auto& line : lines) {
    CHECK(line.size() >= 2);
    for (cd z : line) {
      CHECK(z.imag() >= -2.0 - 1e-12);
      CHECK(z.imag() <= 2.0 + 1e-12);
    }
  }
}
