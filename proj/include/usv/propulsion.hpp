#pragma once

#include <Eigen/Dense>
#include <vector>

#include "usv/types.hpp"

namespace usv {

/// Distance from the body center to each thruster for expansion l [m].
/// The moment arm tracks the hull extension linearly.
inline double thruster_arm(double expansion) { return expansion + 0.4435; }

/// Four thrusters in a "+" layout. Columns map thruster forces f1..f4 to
/// the planar generalized force [Fx, Fy, Mz]:
///   Fx = f2 + f4, Fy = f1 + f3, Mz = L*(-f1 - f2 + f3 + f4).
Eigen::Matrix<double, 3, 4> thrust_matrix(double arm);

/// F = E(arm) * u.
Vec3 allocation(const Vec4& thruster_forces, double arm);

/// Throws std::domain_error naming the first thruster outside [-f_max, f_max].
void require_thrust_within(const Vec4& thruster_forces, double f_max);

/// Componentwise clamp to [-f_max, f_max]; second result reports whether
/// anything was clipped.
std::pair<Vec4, bool> clamp_thrust(const Vec4& thruster_forces, double f_max);

struct ThrusterLayout {
  double arm = thruster_arm(0.0);
  double f_max = 6.0;

  static ThrusterLayout at_expansion(double l, double f_max = 6.0) {
    return ThrusterLayout{thruster_arm(l), f_max};
  }
  Eigen::Matrix<double, 3, 4> matrix() const { return thrust_matrix(arm); }
};

/// Duty-cycle -> force map of one thruster, as a monotone piecewise-linear
/// table over the usable PWM band. The default table is synthetic: the
/// measured bench data is not available, so a symmetric 12-knot curve with
/// a near-flat deadband around the neutral duty stands in for it.
class PropulsionTable {
 public:
  struct Knot {
    double duty;   // fraction of the PWM period
    double force;  // N
  };

  static constexpr double kDutyMin = 0.061;
  static constexpr double kDutyMax = 0.088;
  static constexpr double kDutyNeutral = 0.0745;

  explicit PropulsionTable(std::vector<Knot> knots);

  /// Symmetric default covering [-f_max, f_max].
  static PropulsionTable standard(double f_max = 6.0);

  double pwm_to_force(double duty) const;
  double force_to_pwm(double force) const;

  double min_force() const { return knots_.front().force; }
  double max_force() const { return knots_.back().force; }
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::vector<Knot> knots_;
};

}  // namespace usv
