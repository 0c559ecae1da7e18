#include "usv/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "usv/angles.hpp"

namespace usv {

Mat3 rotation_matrix(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Mat3 r;
  r << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

Mat3 rotation_matrix_derivative(double psi) {
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  Mat3 r;
  r << -s, -c, 0.0,
       c, -s, 0.0,
       0.0, 0.0, 0.0;
  return r;
}

Vec3 coriolis_force(const HydroParams& p, const BodyVelocity& vel) {
  return Vec3(-p.m2 * vel.v * vel.r, p.m1 * vel.u * vel.r,
              (p.m2 - p.m1) * vel.u * vel.v);
}

Vec6 dynamics_derivative(const VesselState& s, const HydroParams& p,
                         const Vec3& force, const Vec3* disturbance) {
  const Vec3 nu(s.vel.u, s.vel.v, s.vel.r);
  const Vec3 eta_dot = rotation_matrix(s.pose.psi) * nu;

  Vec3 rhs = force - coriolis_force(p, s.vel) - p.drag_matrix() * nu;
  if (disturbance != nullptr) rhs += *disturbance;

  Vec6 dq;
  dq << eta_dot, rhs.cwiseQuotient(Vec3(p.m1, p.m2, p.m3));
  return dq;
}

namespace {

Vec6 state_vector(const VesselState& s) { return s.q(); }

VesselState state_from_vector_nowrap(const Vec6& q) {
  VesselState s;
  s.pose.x = q[0];
  s.pose.y = q[1];
  s.pose.psi = q[2];  // caller decides when to rewrap
  s.vel.u = q[3];
  s.vel.v = q[4];
  s.vel.r = q[5];
  return s;
}

Vec6 deriv_at(const Vec6& q, const HydroParams& p, const Vec3& force,
              const Vec3* disturbance) {
  return dynamics_derivative(state_from_vector_nowrap(q), p, force,
                             disturbance);
}

void check_finite(const Vec6& q) {
  static const char* names[6] = {"x", "y", "psi", "u", "v", "r"};
  for (int i = 0; i < 6; ++i) {
    if (!std::isfinite(q[i])) {
      throw std::domain_error(std::string("integration produced non-finite ") +
                              names[i]);
    }
  }
}

}  // namespace

VesselState integrate_rk4(const VesselState& s, const HydroParams& p,
                          const Vec3& force, double dt,
                          const Vec3* disturbance) {
  const Vec6 q0 = state_vector(s);
  const Vec6 k1 = deriv_at(q0, p, force, disturbance);
  const Vec6 k2 = deriv_at(q0 + 0.5 * dt * k1, p, force, disturbance);
  const Vec6 k3 = deriv_at(q0 + 0.5 * dt * k2, p, force, disturbance);
  const Vec6 k4 = deriv_at(q0 + dt * k3, p, force, disturbance);
  Vec6 q1 = q0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  check_finite(q1);
  VesselState out = state_from_vector_nowrap(q1);
  out.pose.psi = wrap_angle(out.pose.psi);
  return out;
}

void dynamics_jacobians(const VesselState& s, const HydroParams& p,
                        Eigen::Matrix<double, 6, 6>& a,
                        Eigen::Matrix<double, 6, 3>& b) {
  const Vec3 nu(s.vel.u, s.vel.v, s.vel.r);
  const Mat3 r = rotation_matrix(s.pose.psi);
  const Mat3 dr = rotation_matrix_derivative(s.pose.psi);
  const Vec3 inv_m(1.0 / p.m1, 1.0 / p.m2, 1.0 / p.m3);

  a.setZero();
  // d eta_dot / d psi and d eta_dot / d nu.
  a.block<3, 1>(0, 2) = dr * nu;
  a.block<3, 3>(0, 3) = r;

  // d nu_dot / d nu = -inv(M) * (dC/dnu + D) where C(v)v is
  // [-m2 v r, m1 u r, (m2-m1) u v].
  Mat3 dcv;
  dcv << 0.0, -p.m2 * s.vel.r, -p.m2 * s.vel.v,
         p.m1 * s.vel.r, 0.0, p.m1 * s.vel.u,
         (p.m2 - p.m1) * s.vel.v, (p.m2 - p.m1) * s.vel.u, 0.0;
  Mat3 d = p.drag_matrix();
  const Mat3 minv = inv_m.asDiagonal();
  a.block<3, 3>(3, 3) = -minv * (dcv + d);

  b.setZero();
  b.block<3, 3>(3, 0) = minv;
}

VesselState rk4_step_with_jacobians(const VesselState& s, const HydroParams& p,
                                    const Vec3& force, double dt,
                                    Eigen::Matrix<double, 6, 6>& ad,
                                    Eigen::Matrix<double, 6, 3>& bd) {
  using M66 = Eigen::Matrix<double, 6, 6>;
  using M63 = Eigen::Matrix<double, 6, 3>;
  const M66 eye = M66::Identity();

  const Vec6 q0 = state_vector(s);

  // Stage values and stage sensitivities dk_i/dq0, dk_i/dF.
  Vec6 q_stage[4];
  Vec6 k[4];
  M66 ka[4];
  M63 kb[4];
  const double coef[4] = {0.0, 0.5, 0.5, 1.0};

  for (int i = 0; i < 4; ++i) {
    M66 dq_dq0 = eye;
    M63 dq_df = M63::Zero();
    q_stage[i] = q0;
    if (i > 0) {
      q_stage[i] = q0 + coef[i] * dt * k[i - 1];
      dq_dq0 = eye + coef[i] * dt * ka[i - 1];
      dq_df = coef[i] * dt * kb[i - 1];
    }
    M66 a;
    M63 b;
    const VesselState stage = state_from_vector_nowrap(q_stage[i]);
    dynamics_jacobians(stage, p, a, b);
    k[i] = dynamics_derivative(stage, p, force, nullptr);
    ka[i] = a * dq_dq0;
    kb[i] = a * dq_df + b;
  }

  Vec6 q1 = q0 + (dt / 6.0) * (k[0] + 2.0 * k[1] + 2.0 * k[2] + k[3]);
  ad = eye + (dt / 6.0) * (ka[0] + 2.0 * ka[1] + 2.0 * ka[2] + ka[3]);
  bd = (dt / 6.0) * (kb[0] + 2.0 * kb[1] + 2.0 * kb[2] + kb[3]);

  check_finite(q1);
  return state_from_vector_nowrap(q1);
}

}  // namespace usv
