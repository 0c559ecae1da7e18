#pragma once

#include <Eigen/Dense>
#include <vector>

#include "usv/reference.hpp"
#include "usv/simulator.hpp"
#include "usv/types.hpp"
#include "usv/vessel_config.hpp"

namespace usv {

struct NmpcConfig {
  int horizon = 20;      // N
  double dt = 0.1;       // control period [s]
  Vec6 q_weight{8000.0, 8000.0, 4000.0, 0.01, 0.01, 0.01};
  Vec6 terminal_weight{8000.0, 8000.0, 4000.0, 0.01, 0.01, 0.01};
  Vec4 u_weight{0.01, 0.01, 0.01, 0.01};  // on control increments
  double u_min = -6.0;
  double u_max = 6.0;
  int max_iterations = 40;
  double kkt_tol = 1e-8;  // scaled by (1 + |cost|)
  bool warm_start = true;
  double position_threshold = 0.05;       // m, loop-termination test
  double yaw_threshold = deg2rad(5.0);    // rad

  void validate() const;
};

enum class NmpcStatus { converged, iteration_cap };

struct NmpcSolution {
  Eigen::Matrix<double, 4, Eigen::Dynamic> u;  // 4 x N
  std::vector<Vec6> predicted;                 // N+1 states, yaw wrapped
  double cost = 0.0;
  int iterations = 0;
  double kkt_residual = 0.0;
  NmpcStatus status = NmpcStatus::converged;

  Vec4 first() const { return u.col(0); }
};

/// Single-shooting transcription of the tracking problem over one
/// horizon. Controls are the free variables (stacked 4N vector); states
/// follow by integrating one RK4 step per stage. Exposes cost, exact
/// gradient, and a Gauss-Newton Hessian for tests and the solver.
class ShootingProblem {
 public:
  ShootingProblem(const Vec6& q0, std::vector<Vec6> refs, const Vec4& last_u,
                  const HydroParams& params, double arm,
                  const NmpcConfig& cfg);

  int dim() const { return 4 * cfg_.horizon; }

  double cost(const Eigen::VectorXd& u_stacked) const;
  double cost_and_gradient(const Eigen::VectorXd& u_stacked,
                           Eigen::VectorXd& grad) const;
  double cost_gradient_hessian(const Eigen::VectorXd& u_stacked,
                               Eigen::VectorXd& grad,
                               Eigen::MatrixXd& hess) const;

  std::vector<Vec6> rollout(const Eigen::VectorXd& u_stacked) const;
  const NmpcConfig& config() const { return cfg_; }

 private:
  double evaluate(const Eigen::VectorXd& u_stacked, Eigen::VectorXd* grad,
                  Eigen::MatrixXd* hess) const;

  Vec6 q0_;
  std::vector<Vec6> refs_;  // N+1 entries, index by stage
  Vec4 last_u_;
  HydroParams params_;
  Eigen::Matrix<double, 3, 4> thrust_;
  NmpcConfig cfg_;
};

/// Projected-Newton solve of the shooting problem from the better of the
/// warm start and the zero sequence; monotone descent keeps the returned
/// cost at or below the zero-control cost. Bounds hold exactly.
NmpcSolution solve_shooting(const ShootingProblem& problem,
                            const Eigen::VectorXd& warm_start);

/// One controller cycle: builds the reference window at t and solves.
NmpcSolution nmpc_step(const VesselState& state,
                       const ReferenceTrajectory& ref, double t,
                       const Vec4& last_u, const NmpcConfig& cfg,
                       const HydroParams& params, double arm,
                       const Eigen::VectorXd* warm = nullptr);

/// Stateful receding-horizon wrapper with warm-start memory.
class NmpcController : public Controller {
 public:
  NmpcController(NmpcConfig cfg, VesselConfig vessel,
                 ReferenceTrajectory ref);

  Output command(const VesselState& s, double t) override;
  void reset() override;

  const NmpcSolution& last_solution() const { return last_solution_; }
  /// Reference tracking reached its thresholds at the latest cycle.
  bool settled() const { return settled_; }

 private:
  NmpcConfig cfg_;
  VesselConfig vessel_;
  ReferenceTrajectory ref_;
  Vec4 last_u_ = Vec4::Zero();
  Eigen::VectorXd warm_;
  bool has_warm_ = false;
  bool settled_ = false;
  NmpcSolution last_solution_;
};

}  // namespace usv
