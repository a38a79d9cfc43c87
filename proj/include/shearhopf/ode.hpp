#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

namespace shearhopf {

using OdeRhs = std::function<void(double y, const Eigen::VectorXcd& z, Eigen::VectorXcd& dz)>;

struct OdeResult {
  Eigen::VectorXcd state;
  int steps = 0;     // accepted steps
  int rejected = 0;
};

// Dormand-Prince 5(4) with local error control. Marching may run towards
// smaller y. Throws StiffnessError when the step size underflows.
OdeResult integrate_ode(const OdeRhs& rhs, double y_from, double y_to,
                        const Eigen::VectorXcd& state0, double tol, int max_steps = 2000000);

}  // namespace shearhopf
