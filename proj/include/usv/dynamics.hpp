#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "usv/types.hpp"

namespace usv {

/// Body-to-world planar rotation about z.
Mat3 rotation_matrix(double psi);

/// dR/dpsi, used by analytic sensitivities.
Mat3 rotation_matrix_derivative(double psi);

/// Coriolis-centripetal force C(v)*v for the diagonal mass matrix.
/// Skew structure guarantees v' * (C(v)*v) == 0.
Vec3 coriolis_force(const HydroParams& p, const BodyVelocity& vel);

/// Time derivative of q = [x, y, psi, u, v, r] under generalized body
/// force F = [Fx, Fy, Mz] plus an optional additive disturbance, also in
/// body frame.
Vec6 dynamics_derivative(const VesselState& s, const HydroParams& p,
                         const Vec3& force, const Vec3* disturbance = nullptr);

/// One classical RK4 step of length dt. Yaw is rewrapped after the step.
/// Throws std::domain_error naming the first non-finite state entry.
VesselState integrate_rk4(const VesselState& s, const HydroParams& p,
                          const Vec3& force, double dt,
                          const Vec3* disturbance = nullptr);

/// Jacobians of the continuous-time dynamics at (q, F):
///   A = d qdot / d q   (6x6), B = d qdot / d F (6x3).
void dynamics_jacobians(const VesselState& s, const HydroParams& p,
                        Eigen::Matrix<double, 6, 6>& a,
                        Eigen::Matrix<double, 6, 3>& b);

/// RK4 step together with exact discrete-time sensitivities, chained
/// through the four stages:
///   q+ = step(q, F),  Ad = d q+ / d q,  Bd = d q+ / d F.
/// Yaw is left unwrapped so the Jacobians stay consistent.
VesselState rk4_step_with_jacobians(const VesselState& s, const HydroParams& p,
                                    const Vec3& force, double dt,
                                    Eigen::Matrix<double, 6, 6>& ad,
                                    Eigen::Matrix<double, 6, 3>& bd);

}  // namespace usv
