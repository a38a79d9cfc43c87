#pragma once

#include <string>
#include <utility>
#include <vector>

#include "shearhopf/orr_sommerfeld.hpp"

namespace shearhopf {

struct MarginalPoint {
  double alpha = 0.0;
  double nu0 = 0.0;
  double omega0 = 0.0;   // lambda = i omega0 at nu0
  double dre_dnu = 0.0;  // d Re lambda / d nu by central differences
  cd dlambda_dnu;        // complex derivative from the same differences
  Eigenpair eigen;
  OSParams params;       // context of the solve, with nu = nu0
  int iterations = 0;
};

struct MarginalOptions {
  double re_tol = 1e-9;         // |Re lambda| at the returned point
  double fd_rel_step = 1e-5;    // central-difference step in nu, relative
  double fd_tol = 1e-12;        // marcher tolerance for the difference solves
  int max_iter = 60;
  double tol = 1e-10;           // marcher tolerance for the root solve
};

// Root of nu -> Re lambda(alpha, nu) inside nu_bracket, tracking the
// eigenvalue seeded at lambda_seed (or at the leading discrete eigenvalue
// of the lower bracket end when no seed is given).
MarginalPoint find_marginal(double alpha, std::pair<double, double> nu_bracket,
                            const ShearProfile& profile, double eta, const GridPtr& grid,
                            const cd* lambda_seed = nullptr, const MarginalOptions& opt = {});

struct BranchTrace {
  std::vector<MarginalPoint> points;
  std::vector<std::string> diagnostics;
  bool monotone = true;  // nu0 monotone in alpha over the traced points
};

// Continuation in alpha along the marginal branch through (start.alpha, start.nu0).
BranchTrace trace_upper_branch(const ShearProfile& profile, std::pair<double, double> alpha_range,
                               int n_points, double eta, const GridPtr& grid,
                               const MarginalPoint& start, const MarginalOptions& opt = {});

struct ProbeSample {
  double d_alpha = 0.0, d_nu = 0.0;
  double alpha = 0.0, nu = 0.0;
  cd lambda;
  bool ok = false;
  std::string note;
};

struct AssumptionAudit {
  bool a1_ok = false;  // Re lambda > 0 on the unstable side
  bool a2_ok = false;  // Re lambda < 0 on the stable side
  bool a3_ok = false;  // d Re lambda / d nu > 0
  bool simple_ok = false;
  std::vector<ProbeSample> a1_evidence, a2_evidence;
  std::vector<std::string> notes;
};

// Probes with d_nu < 0 test (A2), d_nu > 0 test (A1) (the unstable side is
// nu > nu0 on this branch); a zero offset reproduces the marginal eigenvalue.
AssumptionAudit audit_assumptions(const MarginalPoint& mp,
                                  const std::vector<std::pair<double, double>>& probe_offsets);

// Default probe offsets: +-delta relative in nu at fixed alpha.
std::vector<std::pair<double, double>> default_probe_offsets(const MarginalPoint& mp, double rel = 1e-2);

}  // namespace shearhopf
