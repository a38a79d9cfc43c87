#include <cmath>
#include <cstring>

#include "doctest.h"
#include "fixture.hpp"
#include "shearhopf/errors.hpp"
#include "shearhopf/neutral_curve.hpp"

using namespace shearhopf;

TEST_CASE("marginal point contract") {
  const MarginalPoint& mp = fixture::marginal();
  CHECK(std::abs(mp.eigen.lambda.real()) <= 1e-9);
  CHECK(mp.omega0 == mp.eigen.lambda.imag());
  CHECK(mp.dre_dnu > 0.0);
  CHECK(mp.dre_dnu == doctest::Approx(mp.dlambda_dnu.real()));
  CHECK(mp.params.nu == mp.nu0);
}

TEST_CASE("find_marginal is deterministic") {
  const MarginalPoint& a = fixture::marginal();
  const cd seed(0.0, -0.0224);
  const MarginalPoint b = find_marginal(fixture::kAlpha, {7.0e-6, 7.3e-6}, make_exponential(), fixture::kEta,
                                        fixture::grid(), &seed);
  CHECK(std::memcmp(&a.nu0, &b.nu0, sizeof(double)) == 0);
  CHECK(std::memcmp(&a.omega0, &b.omega0, sizeof(double)) == 0);
  CHECK(std::memcmp(&a.dre_dnu, &b.dre_dnu, sizeof(double)) == 0);
}

TEST_CASE("a bracket without a sign change is reported") {
  const cd seed(1e-4, -0.0235);
  try {
    find_marginal(fixture::kAlpha, {8.0e-6, 9.0e-6}, make_exponential(), fixture::kEta, fixture::grid(), &seed);
    FAIL("expected an error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("not bracketed") != std::string::npos);
  }
}

TEST_CASE("assumption audit around the marginal point") {
  const MarginalPoint& mp = fixture::marginal();
  const AssumptionAudit a = audit_assumptions(mp, default_probe_offsets(mp));
  CHECK(a.a1_ok);
  CHECK(a.a2_ok);
  CHECK(a.a3_ok);
  CHECK(a.simple_ok);
  REQUIRE_FALSE(a.a1_evidence.empty());
  for (const ProbeSample& s : a.a1_evidence) CHECK(s.lambda.real() > 0.0);
  for (const ProbeSample& s : a.a2_evidence) CHECK(s.lambda.real() < 0.0);

  const AssumptionAudit z = audit_assumptions(mp, {{0.0, 0.0}});
  for (const auto* ev : {&z.a1_evidence, &z.a2_evidence})
    for (const ProbeSample& s : *ev)
      if (s.d_alpha == 0.0 && s.d_nu == 0.0) CHECK(std::abs(s.lambda - mp.eigen.lambda) <= 1e-9);
}

TEST_CASE("traced branch points are marginal") {
  const MarginalPoint& mp = fixture::marginal();
  const BranchTrace tr = trace_upper_branch(make_exponential(), {0.17, 0.185}, 3, 0.45 * 0.17, fixture::grid(), mp);
  REQUIRE(tr.points.size() == 3);
  for (size_t i = 0; i < tr.points.size(); ++i) {
    CHECK(std::abs(tr.points[i].eigen.lambda.real()) <= 1e-9);
    CHECK(tr.points[i].dre_dnu > 0.0);
    if (i > 0) CHECK(tr.points[i].alpha > tr.points[i - 1].alpha);
  }
}
