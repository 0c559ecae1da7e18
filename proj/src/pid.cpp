#include "usv/pid.hpp"

#include <cmath>
#include <stdexcept>

#include "usv/angles.hpp"
#include "usv/propulsion.hpp"

namespace usv {

void PidGains::validate() const {
  const PidAxisGains* axes[3] = {&longitudinal, &lateral, &rotational};
  for (const PidAxisGains* a : axes) {
    if (a->kp < 0.0 || a->ki < 0.0 || a->kd < 0.0) {
      throw std::invalid_argument("pid gains must be nonnegative");
    }
  }
  if (!(integral_limit > 0.0)) {
    throw std::invalid_argument("pid integral_limit must be positive");
  }
}

AllocationResult allocate_forces(const Vec3& force, double arm, double f_max) {
  if (!(arm > 0.0)) {
    throw std::invalid_argument("allocate_forces: arm must be positive");
  }
  // E E' = diag(2, 2, 4 arm^2), so the minimum-norm solution reduces to
  // the closed form below.
  const double fx = force[0];
  const double fy = force[1];
  const double mz4 = force[2] / (4.0 * arm);
  Vec4 u;
  u << fy / 2.0 - mz4, fx / 2.0 - mz4, fy / 2.0 + mz4, fx / 2.0 + mz4;

  AllocationResult out;
  auto [clamped, clipped] = clamp_thrust(u, f_max);
  out.u = clamped;
  out.clamped = clipped;
  out.residual = (allocation(clamped, arm) - force).norm();
  return out;
}

namespace {

double axis_force(const PidAxisGains& g, double e, double integral,
                  double derivative) {
  return g.kp * e + g.ki * integral + g.kd * derivative;
}

Vec3 clamp_integral(const Vec3& integral, const PidGains& gains) {
  Vec3 out = integral;
  const PidAxisGains* axes[3] = {&gains.longitudinal, &gains.lateral,
                                 &gains.rotational};
  for (int i = 0; i < 3; ++i) {
    if (axes[i]->ki > 0.0) {
      const double cap = gains.integral_limit / axes[i]->ki;
      out[i] = std::clamp(out[i], -cap, cap);
    }
  }
  return out;
}

}  // namespace

PidOutput pid_step(const VesselState& state, const Vec6& q_ref,
                   const PidGains& gains, double dt, const PidState& prev,
                   double arm, double f_max) {
  gains.validate();
  if (!(dt > 0.0)) throw std::invalid_argument("pid dt must be positive");

  const double ex = q_ref[0] - state.pose.x;
  const double ey = q_ref[1] - state.pose.y;
  const double c = std::cos(state.pose.psi);
  const double s = std::sin(state.pose.psi);
  Vec3 e;
  e << c * ex + s * ey,      // longitudinal
      -s * ex + c * ey,      // lateral
      angle_diff(q_ref[2], state.pose.psi);

  PidOutput out;
  out.next = prev;

  // Derivative on the low-pass filtered error; first call yields zero.
  const double tau = 2.0 * dt;
  Vec3 ef_new;
  Vec3 deriv;
  if (!prev.primed) {
    ef_new = e;
    deriv.setZero();
    out.next.primed = true;
  } else {
    const double a = dt / (tau + dt);
    ef_new = prev.filtered_error + a * (e - prev.filtered_error);
    deriv = (ef_new - prev.filtered_error) / dt;
  }
  out.next.filtered_error = ef_new;

  const Vec3 integral_candidate =
      clamp_integral(prev.integral + e * dt, gains);

  const PidAxisGains* axes[3] = {&gains.longitudinal, &gains.lateral,
                                 &gains.rotational};
  Vec3 force;
  for (int i = 0; i < 3; ++i) {
    force[i] = axis_force(*axes[i], e[i], integral_candidate[i], deriv[i]);
  }

  AllocationResult alloc = allocate_forces(force, arm, f_max);
  if (alloc.clamped) {
    // Anti-windup: hold the integrator and re-issue with the old value.
    for (int i = 0; i < 3; ++i) {
      force[i] = axis_force(*axes[i], e[i], prev.integral[i], deriv[i]);
    }
    alloc = allocate_forces(force, arm, f_max);
    out.next.integral = prev.integral;
  } else {
    out.next.integral = integral_candidate;
  }

  out.u = alloc.u;
  out.force = force;
  out.allocation_residual = alloc.residual;
  out.saturated = alloc.clamped;
  return out;
}

PidController::PidController(VesselConfig vessel, ReferenceTrajectory ref,
                             double dt, double integral_limit)
    : vessel_(std::move(vessel)),
      ref_(std::move(ref)),
      dt_(dt),
      integral_limit_(integral_limit) {}

void PidController::reset() { state_ = PidState{}; }

Controller::Output PidController::command(const VesselState& s, double t) {
  PidGains gains = PidGains::for_form(s.expansion > 0.25);
  gains.integral_limit = integral_limit_;
  const Vec6 target = ref_.sample_at(t);
  PidOutput out = pid_step(s, target, gains, dt_, state_,
                           vessel_.thruster_arm(s.expansion), vessel_.f_max);
  state_ = out.next;
  Output result;
  result.u = out.u;
  return result;
}

}  // namespace usv
