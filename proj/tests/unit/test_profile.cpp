#include <cmath>

#include "doctest.h"
#include "shearhopf/errors.hpp"
#include "shearhopf/profile.hpp"

using namespace shearhopf;

TEST_CASE("exponential profile closed form") {
  const ShearProfile p = make_exponential();
  CHECK(p.u(0.0) == 0.0);
  CHECK(p.u(10.0) == doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-15));
  CHECK(p.u(10.0) == doctest::Approx(0.9999546).epsilon(1e-7));
  for (double y : {0.0, 0.3, 1.0, 4.0, 12.0}) CHECK(p.d2u(y) == -p.du(y));
  CHECK(p.u_plus == 1.0);
  CHECK(p.gamma == 1.0);
}

TEST_CASE("tanh profile") {
  const ShearProfile p = make_tanh(1.0);
  CHECK(p.u(0.0) == 0.0);
  CHECK(p.u(2.0) == doctest::Approx(0.96403).epsilon(1e-5));
  CHECK(make_tanh(2.5).du(0.0) == doctest::Approx(1.0 / 2.5));
  CHECK(make_tanh(2.5).gamma == doctest::Approx(2.0 / 2.5));
  CHECK_THROWS_AS(make_tanh(0.0), InvalidParameter);
  CHECK_THROWS_AS(make_tanh(-1.0), InvalidParameter);
}

TEST_CASE("profile registry") {
  CHECK_THROWS_AS(make_profile("blasius"), InvalidParameter);
  for (const std::string& name : profile_names()) {
    const ShearProfile p = make_profile(name);
    CHECK(p.name == name);
    CHECK(p.u(0.0) == 0.0);
  }
}

TEST_CASE("derivatives agree with centered differences for every profile") {
  for (const std::string& name : profile_names()) {
    const ShearProfile p = make_profile(name);
    for (double y = 0.05; y < 15.0; y *= 1.7) {
      const double h = 1e-4 * std::max(1.0, y);
      const double du_fd = (p.u(y + h) - p.u(y - h)) / (2 * h);
      const double d2u_fd = (p.du(y + h) - p.du(y - h)) / (2 * h);
      CAPTURE(name);
      CAPTURE(y);
      CHECK(std::abs(du_fd - p.du(y)) <= 1e-6 * std::max(std::abs(p.du(y)), 1e-12) + 1e-14);
      CHECK(std::abs(d2u_fd - p.d2u(y)) <= 1e-6 * std::max(std::abs(p.d2u(y)), 1e-12) + 1e-14);
    }
  }
}

TEST_CASE("validate_profile envelope") {
  const DiagnosticsReport r = validate_profile(make_exponential(), 20.0, 200);
  CHECK(r.pass);
  CHECK(r.envelope_bound == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(validate_profile(make_tanh(1.0), 20.0, 200).pass);
}

TEST_CASE("validate_profile rejects a nonzero wall value") {
  ShearProfile p = make_exponential();
  p.u = [](double y) { return 1.1 - std::exp(-y); };
  const DiagnosticsReport r = validate_profile(p, 20.0, 200);
  CHECK_FALSE(r.pass);
  REQUIRE_FALSE(r.reasons.empty());
  CHECK(r.reasons.front() == "nonzero wall value");
}

TEST_CASE("validate_profile is monotone in y_max") {
  for (const std::string& name : profile_names()) {
    bool prev = validate_profile(make_profile(name), 40.0, 400).pass;
    for (double ymax : {30.0, 20.0, 10.0, 5.0}) {
      const bool now = validate_profile(make_profile(name), ymax, 400).pass;
      CHECK((now || !prev));
      prev = now;
    }
  }
}
