#include "usv/propulsion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace usv {

Eigen::Matrix<double, 3, 4> thrust_matrix(double arm) {
  Eigen::Matrix<double, 3, 4> e;
  e << 0.0, 1.0, 0.0, 1.0,
       1.0, 0.0, 1.0, 0.0,
       -arm, -arm, arm, arm;
  return e;
}

Vec3 allocation(const Vec4& thruster_forces, double arm) {
  return thrust_matrix(arm) * thruster_forces;
}

void require_thrust_within(const Vec4& thruster_forces, double f_max) {
  for (int i = 0; i < 4; ++i) {
    if (std::abs(thruster_forces[i]) > f_max) {
      throw std::domain_error("thruster f" + std::to_string(i + 1) +
                              " out of range: " +
                              std::to_string(thruster_forces[i]) +
                              " exceeds " + std::to_string(f_max));
    }
  }
}

std::pair<Vec4, bool> clamp_thrust(const Vec4& thruster_forces, double f_max) {
  Vec4 out = thruster_forces;
  bool clipped = false;
  for (int i = 0; i < 4; ++i) {
    double c = std::clamp(out[i], -f_max, f_max);
    if (c != out[i]) clipped = true;
    out[i] = c;
  }
  return {out, clipped};
}

PropulsionTable::PropulsionTable(std::vector<Knot> knots)
    : knots_(std::move(knots)) {
  if (knots_.size() < 2) {
    throw std::invalid_argument("propulsion table needs at least 2 knots");
  }
  for (size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i].duty > knots_[i - 1].duty)) {
      throw std::invalid_argument("propulsion table duties must increase");
    }
    if (!(knots_[i].force > knots_[i - 1].force)) {
      throw std::invalid_argument("propulsion table forces must increase");
    }
  }
}

PropulsionTable PropulsionTable::standard(double f_max) {
  // Near-flat deadband around neutral: the two inner knots carry a small
  // nonzero force so both maps stay strictly monotone and invert exactly
  // at every knot.
  const double s = f_max / 6.0;
  std::vector<Knot> k = {
      {0.0610, -6.0 * s}, {0.0635, -4.5 * s}, {0.0660, -3.2 * s},
      {0.0685, -2.1 * s}, {0.0710, -1.0 * s}, {0.0735, -0.02 * s},
      {0.0755, 0.02 * s}, {0.0780, 1.0 * s},  {0.0805, 2.1 * s},
      {0.0830, 3.2 * s},  {0.0855, 4.5 * s},  {0.0880, 6.0 * s},
  };
  return PropulsionTable(std::move(k));
}

namespace {

double lerp_clamped(double x, double x0, double y0, double x1, double y1) {
  double t = (x - x0) / (x1 - x0);
  return y0 + t * (y1 - y0);
}

}  // namespace

double PropulsionTable::pwm_to_force(double duty) const {
  if (duty <= knots_.front().duty) return knots_.front().force;
  if (duty >= knots_.back().duty) return knots_.back().force;
  for (size_t i = 1; i < knots_.size(); ++i) {
    if (duty <= knots_[i].duty) {
      return lerp_clamped(duty, knots_[i - 1].duty, knots_[i - 1].force,
                          knots_[i].duty, knots_[i].force);
    }
  }
  return knots_.back().force;
}

double PropulsionTable::force_to_pwm(double force) const {
  if (force <= knots_.front().force) return knots_.front().duty;
  if (force >= knots_.back().force) return knots_.back().duty;
  for (size_t i = 1; i < knots_.size(); ++i) {
    if (force <= knots_[i].force) {
      return lerp_clamped(force, knots_[i - 1].force, knots_[i - 1].duty,
                          knots_[i].force, knots_[i].duty);
    }
  }
  return knots_.back().duty;
}

}  // namespace usv
