#include "usv/nmpc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "usv/angles.hpp"
#include "usv/dynamics.hpp"
#include "usv/propulsion.hpp"

namespace usv {

void NmpcConfig::validate() const {
  if (horizon < 2) throw std::invalid_argument("nmpc.horizon: must be >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("nmpc.dt: must be positive");
  for (int i = 0; i < 6; ++i) {
    if (!(q_weight[i] > 0.0) || !(terminal_weight[i] > 0.0)) {
      throw std::invalid_argument("nmpc.weights: must be positive definite");
    }
  }
  for (int i = 0; i < 4; ++i) {
    if (!(u_weight[i] > 0.0)) {
      throw std::invalid_argument("nmpc.u_weight: must be positive definite");
    }
  }
  if (!(u_min < u_max)) {
    throw std::invalid_argument("nmpc.bounds: u_min must be below u_max");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument("nmpc.max_iterations: must be >= 1");
  }
}

ShootingProblem::ShootingProblem(const Vec6& q0, std::vector<Vec6> refs,
                                 const Vec4& last_u,
                                 const HydroParams& params, double arm,
                                 const NmpcConfig& cfg)
    : q0_(q0),
      refs_(std::move(refs)),
      last_u_(last_u),
      params_(params),
      thrust_(thrust_matrix(arm)),
      cfg_(cfg) {
  cfg_.validate();
  if (refs_.size() != static_cast<size_t>(cfg_.horizon) + 1) {
    throw std::invalid_argument("shooting: refs must cover N+1 stages");
  }
}

namespace {

/// Stage error with wrapped yaw component.
Vec6 stage_error(const Vec6& q, const Vec6& ref) {
  Vec6 e = q - ref;
  e[2] = angle_diff(q[2], ref[2]);
  return e;
}

}  // namespace

double ShootingProblem::evaluate(const Eigen::VectorXd& u_stacked,
                                 Eigen::VectorXd* grad,
                                 Eigen::MatrixXd* hess) const {
  const int n = cfg_.horizon;
  if (u_stacked.size() != 4 * n) {
    throw std::invalid_argument("shooting: control vector has wrong size");
  }
  using M66 = Eigen::Matrix<double, 6, 6>;
  using M63 = Eigen::Matrix<double, 6, 3>;
  using M64 = Eigen::Matrix<double, 6, 4>;

  const bool need_grad = grad != nullptr;
  const bool need_hess = hess != nullptr;
  if (need_grad) grad->setZero(4 * n);
  if (need_hess) hess->setZero(4 * n, 4 * n);

  // Sensitivity of the current stage state w.r.t. the stacked controls.
  Eigen::MatrixXd g_state;
  if (need_grad) g_state.setZero(6, 4 * n);

  double cost = 0.0;

  // Constant stage-0 state term; keeps the reported cost aligned with the
  // full horizon sum. It does not depend on the controls.
  cost += stage_error(q0_, refs_[0]).dot(
      cfg_.q_weight.cwiseProduct(stage_error(q0_, refs_[0])));

  Vec6 q = q0_;
  VesselState s = VesselState::from_q(q, 0.0);
  s.pose.psi = q[2];  // keep yaw unwrapped alongside the sensitivities

  for (int k = 0; k < n; ++k) {
    const Vec4 u = u_stacked.segment<4>(4 * k);
    const Vec3 force = thrust_ * u;

    M66 ad;
    M63 bd;
    VesselState next = rk4_step_with_jacobians(s, params_, force, cfg_.dt,
                                               ad, bd);
    const M64 bu = bd * thrust_;

    if (need_grad) {
      g_state = ad * g_state;
      g_state.block<6, 4>(0, 4 * k) += bu;
    }

    q = next.q();
    s = next;

    const Vec6& w =
        (k + 1 == n) ? cfg_.terminal_weight : cfg_.q_weight;
    const Vec6 e = stage_error(q, refs_[static_cast<size_t>(k) + 1]);
    cost += e.dot(w.cwiseProduct(e));
    if (need_grad) {
      *grad += 2.0 * g_state.transpose() * w.cwiseProduct(e);
    }
    if (need_hess) {
      hess->noalias() +=
          2.0 * g_state.transpose() * w.asDiagonal() * g_state;
    }
  }

  // Control-increment terms; u_{-1} is the previously applied command.
  for (int k = 0; k < n; ++k) {
    const Vec4 u_k = u_stacked.segment<4>(4 * k);
    const Vec4 u_prev =
        k == 0 ? last_u_ : Vec4(u_stacked.segment<4>(4 * (k - 1)));
    const Vec4 du = u_k - u_prev;
    cost += du.dot(cfg_.u_weight.cwiseProduct(du));
    if (need_grad) {
      grad->segment<4>(4 * k) += 2.0 * cfg_.u_weight.cwiseProduct(du);
      if (k > 0) {
        grad->segment<4>(4 * (k - 1)) -= 2.0 * cfg_.u_weight.cwiseProduct(du);
      }
    }
    if (need_hess) {
      for (int i = 0; i < 4; ++i) {
        const double h = 2.0 * cfg_.u_weight[i];
        (*hess)(4 * k + i, 4 * k + i) += h;
        if (k > 0) {
          (*hess)(4 * (k - 1) + i, 4 * (k - 1) + i) += h;
          (*hess)(4 * k + i, 4 * (k - 1) + i) -= h;
          (*hess)(4 * (k - 1) + i, 4 * k + i) -= h;
        }
      }
    }
  }
  return cost;
}

double ShootingProblem::cost(const Eigen::VectorXd& u_stacked) const {
  return evaluate(u_stacked, nullptr, nullptr);
}

double ShootingProblem::cost_and_gradient(const Eigen::VectorXd& u_stacked,
                                          Eigen::VectorXd& grad) const {
  return evaluate(u_stacked, &grad, nullptr);
}

double ShootingProblem::cost_gradient_hessian(const Eigen::VectorXd& u_stacked,
                                              Eigen::VectorXd& grad,
                                              Eigen::MatrixXd& hess) const {
  return evaluate(u_stacked, &grad, &hess);
}

std::vector<Vec6> ShootingProblem::rollout(
    const Eigen::VectorXd& u_stacked) const {
  std::vector<Vec6> states;
  states.reserve(static_cast<size_t>(cfg_.horizon) + 1);
  Vec6 q = q0_;
  states.push_back(q);
  VesselState s = VesselState::from_q(q, 0.0);
  s.pose.psi = q[2];
  for (int k = 0; k < cfg_.horizon; ++k) {
    const Vec3 force = thrust_ * Vec4(u_stacked.segment<4>(4 * k));
    Eigen::Matrix<double, 6, 6> ad;
    Eigen::Matrix<double, 6, 3> bd;
    s = rk4_step_with_jacobians(s, params_, force, cfg_.dt, ad, bd);
    states.push_back(s.q());
  }
  return states;
}

namespace {

Eigen::VectorXd clamp_box(const Eigen::VectorXd& u, double lo, double hi) {
  return u.cwiseMax(lo).cwiseMin(hi);
}

/// Inf-norm of the projected gradient step, the box-KKT measure.
double kkt_residual(const Eigen::VectorXd& u, const Eigen::VectorXd& g,
                    double lo, double hi) {
  return (clamp_box(u - g, lo, hi) - u).cwiseAbs().maxCoeff();
}

}  // namespace

NmpcSolution solve_shooting(const ShootingProblem& problem,
                            const Eigen::VectorXd& warm_start) {
  const NmpcConfig& cfg = problem.config();
  const int dim = problem.dim();
  const double lo = cfg.u_min;
  const double hi = cfg.u_max;

  // Start from the better of the warm start and the zero sequence; this
  // pins the final cost at or below the zero-control cost.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
  double cost = problem.cost(u);
  if (warm_start.size() == dim) {
    const Eigen::VectorXd w = clamp_box(warm_start, lo, hi);
    const double wc = problem.cost(w);
    if (wc < cost) {
      u = w;
      cost = wc;
    }
  }

  Eigen::VectorXd grad(dim);
  Eigen::MatrixXd hess(dim, dim);
  NmpcSolution sol;
  sol.status = NmpcStatus::iteration_cap;

  int iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    cost = problem.cost_gradient_hessian(u, grad, hess);
    if (kkt_residual(u, grad, lo, hi) <= cfg.kkt_tol * (1.0 + std::abs(cost))) {
      break;
    }

    // Two-metric projection: Newton on the free set, steepest descent on
    // the active set (at a bound with the gradient pushing outward).
    std::vector<int> free_idx;
    free_idx.reserve(dim);
    const double edge = 1e-12 * (hi - lo);
    for (int i = 0; i < dim; ++i) {
      const bool at_lo = u[i] <= lo + edge && grad[i] > 0.0;
      const bool at_hi = u[i] >= hi - edge && grad[i] < 0.0;
      if (!at_lo && !at_hi) free_idx.push_back(i);
    }

    Eigen::VectorXd dir = -grad;
    if (!free_idx.empty()) {
      const int nf = static_cast<int>(free_idx.size());
      Eigen::MatrixXd hf(nf, nf);
      Eigen::VectorXd gf(nf);
      for (int a = 0; a < nf; ++a) {
        gf[a] = grad[free_idx[a]];
        for (int b = 0; b < nf; ++b) {
          hf(a, b) = hess(free_idx[a], free_idx[b]);
        }
      }
      double damping = 0.0;
      for (int attempt = 0; attempt < 6; ++attempt) {
        Eigen::MatrixXd h = hf;
        if (damping > 0.0) h.diagonal().array() += damping;
        const Eigen::VectorXd pf = h.ldlt().solve(-gf);
        if (pf.allFinite() && gf.dot(pf) < 0.0) {
          for (int a = 0; a < nf; ++a) dir[free_idx[a]] = pf[a];
          break;
        }
        damping = damping == 0.0 ? 1e-6 : damping * 100.0;
      }
    }

    // Projected Armijo backtracking.
    bool stepped = false;
    double alpha = 1.0;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::VectorXd u_try = clamp_box(u + alpha * dir, lo, hi);
      const Eigen::VectorXd du = u_try - u;
      if (du.cwiseAbs().maxCoeff() <= 1e-16) break;
      const double c_try = problem.cost(u_try);
      if (c_try <= cost + 1e-4 * grad.dot(du)) {
        u = u_try;
        cost = c_try;
        stepped = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!stepped) {
      // No descent step available at machine precision.
      ++iter;
      break;
    }
  }

  sol.iterations = iter;
  {
    Eigen::VectorXd g(dim);
    sol.cost = problem.cost_and_gradient(u, g);
    sol.kkt_residual = kkt_residual(u, g, lo, hi);
    sol.status = sol.kkt_residual <= cfg.kkt_tol * (1.0 + std::abs(sol.cost))
                     ? NmpcStatus::converged
                     : NmpcStatus::iteration_cap;
  }
  sol.u.resize(4, cfg.horizon);
  for (int k = 0; k < cfg.horizon; ++k) {
    sol.u.col(k) = u.segment<4>(4 * k);
  }
  const std::vector<Vec6> states = problem.rollout(u);
  sol.predicted.reserve(states.size());
  for (Vec6 q : states) {
    q[2] = wrap_angle(q[2]);
    sol.predicted.push_back(q);
  }
  return sol;
}

NmpcSolution nmpc_step(const VesselState& state, const ReferenceTrajectory& ref,
                       double t, const Vec4& last_u, const NmpcConfig& cfg,
                       const HydroParams& params, double arm,
                       const Eigen::VectorXd* warm) {
  std::vector<Vec6> refs;
  refs.reserve(static_cast<size_t>(cfg.horizon) + 1);
  for (int k = 0; k <= cfg.horizon; ++k) {
    refs.push_back(ref.sample_at(t + k * cfg.dt));
  }
  ShootingProblem problem(state.q(), std::move(refs), last_u, params, arm,
                          cfg);
  static const Eigen::VectorXd kEmpty;
  return solve_shooting(problem, warm != nullptr ? *warm : kEmpty);
}

NmpcController::NmpcController(NmpcConfig cfg, VesselConfig vessel,
                               ReferenceTrajectory ref)
    : cfg_(cfg), vessel_(std::move(vessel)), ref_(std::move(ref)) {
  cfg_.validate();
}

void NmpcController::reset() {
  last_u_.setZero();
  has_warm_ = false;
  settled_ = false;
}

Controller::Output NmpcController::command(const VesselState& s, double t) {
  const HydroParams params = vessel_.params_at(s.expansion);
  const double arm = vessel_.thruster_arm(s.expansion);

  NmpcConfig cfg = cfg_;
  cfg.u_max = std::min(cfg.u_max, vessel_.f_max);
  cfg.u_min = std::max(cfg.u_min, -vessel_.f_max);

  const Eigen::VectorXd* warm =
      (cfg_.warm_start && has_warm_) ? &warm_ : nullptr;
  last_solution_ = nmpc_step(s, ref_, t, last_u_, cfg, params, arm, warm);

  // Shift the solution one stage for the next cycle's warm start.
  const int n = cfg.horizon;
  warm_.resize(4 * n);
  for (int k = 0; k + 1 < n; ++k) {
    warm_.segment<4>(4 * k) = last_solution_.u.col(k + 1);
  }
  warm_.segment<4>(4 * (n - 1)) = last_solution_.u.col(n - 1);
  has_warm_ = true;

  last_u_ = last_solution_.first();

  const Vec6 target = ref_.sample_at(t);
  const double pos_err = std::hypot(s.pose.x - target[0], s.pose.y - target[1]);
  const double yaw_err = std::abs(angle_diff(s.pose.psi, target[2]));
  settled_ = pos_err < cfg_.position_threshold && yaw_err < cfg_.yaw_threshold;

  Output out;
  out.u = last_u_;
  if (last_solution_.status != NmpcStatus::converged) {
    std::ostringstream ss;
    ss << "iteration cap, kkt " << last_solution_.kkt_residual;
    out.events.push_back(SimEvent{t, "solver", ss.str()});
  }
  return out;
}

}  // namespace usv
