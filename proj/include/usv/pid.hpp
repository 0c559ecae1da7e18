#pragma once

#include "usv/reference.hpp"
#include "usv/simulator.hpp"
#include "usv/types.hpp"
#include "usv/vessel_config.hpp"

namespace usv {

struct PidAxisGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
};

/// Three independent loops on the body-frame errors. The stock gain sets
/// per hull form were tuned by the relay (Ziegler-Nichols) procedure on
/// the reference vehicle.
struct PidGains {
  PidAxisGains longitudinal;
  PidAxisGains lateral;
  PidAxisGains rotational;
  double integral_limit = 50.0;  // cap on |ki * integral| per axis

  static PidGains contracted() {
    return PidGains{{349.0, 1.4, 0.9}, {349.0, 1.5, 1.0}, {67.0, 1.6, 1.1}};
  }
  static PidGains expanded() {
    return PidGains{{433.0, 1.4, 0.9}, {349.0, 1.6, 1.1}, {107.0, 1.5, 1.0}};
  }
  static PidGains for_form(bool is_expanded) {
    return is_expanded ? expanded() : contracted();
  }

  void validate() const;
};

struct PidState {
  Vec3 integral = Vec3::Zero();
  Vec3 filtered_error = Vec3::Zero();
  bool primed = false;
};

struct PidOutput {
  Vec4 u = Vec4::Zero();       // clamped thruster forces
  Vec3 force = Vec3::Zero();   // requested wrench before allocation
  double allocation_residual = 0.0;
  bool saturated = false;
  PidState next;
};

/// One control cycle. Position error is rotated into the body frame; the
/// derivative acts on a low-pass filtered error (time constant 2 dt) and
/// is zero on the first call. The integrator freezes while the thrusters
/// saturate and is clamped by the anti-windup limit.
PidOutput pid_step(const VesselState& state, const Vec6& q_ref,
                   const PidGains& gains, double dt, const PidState& prev,
                   double arm, double f_max);

struct AllocationResult {
  Vec4 u = Vec4::Zero();
  double residual = 0.0;  // ||E u - F|| after clamping
  bool clamped = false;
};

/// Minimum-norm thruster solution of E u = F via the closed form
/// u = E' (E E')^-1 F, then componentwise clamping.
AllocationResult allocate_forces(const Vec3& force, double arm, double f_max);

/// Reference-following wrapper; picks the gain set by hull form at each
/// cycle.
class PidController : public Controller {
 public:
  PidController(VesselConfig vessel, ReferenceTrajectory ref, double dt,
                double integral_limit = 50.0);

  Output command(const VesselState& s, double t) override;
  void reset() override;

 private:
  VesselConfig vessel_;
  ReferenceTrajectory ref_;
  double dt_;
  double integral_limit_;
  PidState state_;
};

}  // namespace usv
