#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace usv {

/// Box-constrained nonlinear least squares: minimize ||r(x)||^2 subject
/// to lower <= x <= upper. The residual callback returns false when the
/// point is infeasible (diverging simulation etc.), which the solver
/// treats as infinite cost.
struct BoundedLsqProblem {
  std::function<bool(const Eigen::VectorXd& x, Eigen::VectorXd& r)> residual;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

struct BoundedLsqOptions {
  int max_iterations = 120;
  double gradient_tol = 1e-10;  // projected gradient inf-norm
  double step_tol = 1e-12;      // relative step size
  double cost_tol = 1e-15;      // absolute cost floor
  double fd_step_rel = 1e-6;    // forward-difference step, relative
};

struct BoundedLsqResult {
  Eigen::VectorXd x;
  double cost = 0.0;  // ||r||^2
  int iterations = 0;
  bool converged = false;
  bool active_bound = false;  // any component pinned at a bound
  std::string message;
};

/// Levenberg-Marquardt steps with a forward-difference Jacobian; trial
/// points are projected onto the box and accepted on actual cost
/// reduction. Damping adapts on the gain ratio.
BoundedLsqResult minimize_bounded_lsq(const BoundedLsqProblem& problem,
                                      const Eigen::VectorXd& x0,
                                      const BoundedLsqOptions& options = {});

}  // namespace usv
