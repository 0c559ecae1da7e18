#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "usv/angles.hpp"

namespace usv {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Largest per-side hull extension supported by the identified model [m].
inline constexpr double kMaxExpansion = 0.5;

/// Planar pose in the inertial frame. Yaw is kept in (-pi, pi].
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double psi = 0.0;

  Pose() = default;
  Pose(double x_, double y_, double psi_) : x(x_), y(y_), psi(wrap_angle(psi_)) {}

  Eigen::Vector2d position() const { return {x, y}; }
};

/// Body-frame velocity: surge u, sway v, yaw rate r.
struct BodyVelocity {
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;

  Vec3 vec() const { return {u, v, r}; }
  bool finite() const { return std::isfinite(u) && std::isfinite(v) && std::isfinite(r); }
};

/// Full vehicle state: pose, body velocity, and per-side hull expansion l.
struct VesselState {
  Pose pose;
  BodyVelocity vel;
  double expansion = 0.0;

  /// State vector [x, y, psi, u, v, r].
  Vec6 q() const {
    Vec6 out;
    out << pose.x, pose.y, pose.psi, vel.u, vel.v, vel.r;
    return out;
  }

  static VesselState from_q(const Vec6& q, double expansion) {
    VesselState s;
    s.pose = Pose(q[0], q[1], q[2]);
    s.vel = BodyVelocity{q[3], q[4], q[5]};
    s.expansion = expansion;
    return s;
  }

  void validate() const {
    if (!(expansion >= 0.0 && expansion <= kMaxExpansion)) {
      throw std::domain_error("VesselState.expansion: " + std::to_string(expansion) +
                              " outside [0, " + std::to_string(kMaxExpansion) + "]");
    }
    if (!vel.finite()) {
      throw std::domain_error("VesselState.vel: non-finite component");
    }
  }
};

/// Hydrodynamic coefficient set at one expansion length: combined
/// inertial+added masses m1..m3 and linear drag Xu, Yv, Nr.
///
/// The hull is symmetric, so m1 == m2 and Xu == Yv by construction.
struct HydroParams {
  double m1 = 0.0;  // kg
  double m2 = 0.0;  // kg
  double m3 = 0.0;  // kg m^2
  double Xu = 0.0;  // kg/s
  double Yv = 0.0;  // kg/s
  double Nr = 0.0;  // kg m^2/s

  static HydroParams symmetric(double m12, double m3, double xuyv, double nr) {
    return HydroParams{m12, m12, m3, xuyv, xuyv, nr};
  }

  void validate() const {
    const double vals[6] = {m1, m2, m3, Xu, Yv, Nr};
    const char* names[6] = {"m1", "m2", "m3", "Xu", "Yv", "Nr"};
    for (int i = 0; i < 6; ++i) {
      if (!(vals[i] > 0.0) || !std::isfinite(vals[i])) {
        throw std::domain_error(std::string("HydroParams.") + names[i] + ": must be strictly positive");
      }
    }
    if (m1 != m2 || Xu != Yv) {
      throw std::domain_error("HydroParams: symmetry m1 == m2, Xu == Yv violated");
    }
  }

  /// Rigid payload attached at the body center: mass terms grow, drag does not.
  HydroParams with_payload(double mass, double yaw_inertia) const {
    HydroParams p = *this;
    p.m1 += mass;
    p.m2 += mass;
    p.m3 += yaw_inertia;
    return p;
  }

  Mat3 mass_matrix() const {
    Mat3 m = Mat3::Zero();
    m(0, 0) = m1;
    m(1, 1) = m2;
    m(2, 2) = m3;
    return m;
  }

  Mat3 drag_matrix() const {
    Mat3 d = Mat3::Zero();
    d(0, 0) = Xu;
    d(1, 1) = Yv;
    d(2, 2) = Nr;
    return d;
  }
};

/// Quadratic c2*l^2 + c1*l + c0.
struct Quadratic {
  double c2 = 0.0;
  double c1 = 0.0;
  double c0 = 0.0;

  double eval(double l) const { return (c2 * l + c1) * l + c0; }
};

/// Per-parameter quadratic maps from expansion length to the hydrodynamic
/// coefficients. Default-constructed instances carry the stock identified
/// coefficient set for the reference hull.
struct ParamPolynomials {
  Quadratic m12{0.11317070, 8.13430784, 22.82839307};
  Quadratic m3{0.13027175, 1.88878483, 7.57931479};
  Quadratic xuyv{-1.01327442, 9.75583033, 19.79519544};
  Quadratic nr{0.21534853, 1.19699306, 2.27478185};

  /// Evaluate the coefficient set at expansion l. Refuses to extrapolate
  /// beyond the supported range unless explicitly allowed.
  HydroParams eval(double l, bool allow_extrapolation = false) const {
    if (!allow_extrapolation && !(l >= 0.0 && l <= kMaxExpansion)) {
      throw std::out_of_range("ParamPolynomials.eval: l = " + std::to_string(l) +
                              " outside supported range [0, " + std::to_string(kMaxExpansion) + "]");
    }
    HydroParams p = HydroParams::symmetric(m12.eval(l), m3.eval(l), xuyv.eval(l), nr.eval(l));
    p.validate();
    return p;
  }
};

}  // namespace usv
