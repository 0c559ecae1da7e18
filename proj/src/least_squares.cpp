#include "usv/least_squares.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace usv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd project(const Eigen::VectorXd& x, const BoundedLsqProblem& p) {
  return x.cwiseMax(p.lower).cwiseMin(p.upper);
}

/// Inf-norm of the projected gradient: measures stationarity on the box.
double projected_gradient_norm(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& g,
                               const BoundedLsqProblem& p) {
  double norm = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double gi = g[i];
    if (x[i] <= p.lower[i] && gi > 0.0) gi = 0.0;
    if (x[i] >= p.upper[i] && gi < 0.0) gi = 0.0;
    norm = std::max(norm, std::abs(gi));
  }
  return norm;
}

}  // namespace

BoundedLsqResult minimize_bounded_lsq(const BoundedLsqProblem& problem,
                                      const Eigen::VectorXd& x0,
                                      const BoundedLsqOptions& opt) {
  const Eigen::Index n = x0.size();
  if (problem.lower.size() != n || problem.upper.size() != n) {
    throw std::invalid_argument("bounds dimension mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(problem.lower[i] <= problem.upper[i])) {
      throw std::invalid_argument("lower bound exceeds upper bound");
    }
  }

  BoundedLsqResult res;
  res.x = project(x0, problem);

  Eigen::VectorXd r;
  if (!problem.residual(res.x, r)) {
    res.cost = kInf;
    res.message = "infeasible start";
    return res;
  }
  res.cost = r.squaredNorm();

  const Eigen::Index m = r.size();
  Eigen::MatrixXd jac(m, n);
  Eigen::VectorXd r_probe;
  double lambda = 1e-3;

  for (res.iterations = 0; res.iterations < opt.max_iterations;
       ++res.iterations) {
    if (res.cost <= opt.cost_tol) {
      res.converged = true;
      res.message = "cost below floor";
      break;
    }

    // Forward-difference Jacobian; probe steps stay inside the box by
    // flipping direction at the upper bound.
    bool jac_ok = true;
    for (Eigen::Index j = 0; j < n; ++j) {
      double h = opt.fd_step_rel * std::max(std::abs(res.x[j]), 1e-8);
      Eigen::VectorXd xp = res.x;
      if (xp[j] + h > problem.upper[j]) h = -h;
      xp[j] += h;
      if (!problem.residual(xp, r_probe)) {
        jac_ok = false;
        break;
      }
      jac.col(j) = (r_probe - r) / h;
    }
    if (!jac_ok) {
      res.message = "jacobian probe infeasible";
      break;
    }

    const Eigen::VectorXd g = 2.0 * jac.transpose() * r;
    if (projected_gradient_norm(res.x, g, problem) <=
        opt.gradient_tol * (1.0 + res.cost)) {
      res.converged = true;
      res.message = "stationary";
      break;
    }

    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    bool stepped = false;
    for (int attempt = 0; attempt < 12; ++attempt) {
      Eigen::MatrixXd h = jtj;
      h.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd p = h.ldlt().solve(-jac.transpose() * r);
      const Eigen::VectorXd x_new = project(res.x + p, problem);
      const Eigen::VectorXd dx = x_new - res.x;
      if (dx.norm() <= opt.step_tol * (res.x.norm() + opt.step_tol)) {
        lambda *= 4.0;
        continue;
      }
      if (!problem.residual(x_new, r_probe)) {
        lambda *= 4.0;
        continue;
      }
      const double cost_new = r_probe.squaredNorm();
      const double predicted =
          -(2.0 * r.transpose() * jac * dx)(0) - (jac * dx).squaredNorm();
      const double actual = res.cost - cost_new;
      if (actual > 0.0) {
        res.x = x_new;
        res.cost = cost_new;
        r = r_probe;
        const double rho = predicted > 0.0 ? actual / predicted : 1.0;
        lambda = rho > 0.75 ? lambda * 0.5 : (rho < 0.25 ? lambda * 2.0 : lambda);
        lambda = std::max(lambda, 1e-12);
        stepped = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!stepped) {
      res.converged = true;
      res.message = "no further progress";
      break;
    }
  }
  if (res.message.empty()) res.message = "iteration cap";

  for (Eigen::Index i = 0; i < n; ++i) {
    const double span = problem.upper[i] - problem.lower[i];
    const double eps = 1e-9 * std::max(span, 1.0);
    if (res.x[i] <= problem.lower[i] + eps || res.x[i] >= problem.upper[i] - eps) {
      res.active_bound = true;
    }
  }
  return res;
}

}  // namespace usv
