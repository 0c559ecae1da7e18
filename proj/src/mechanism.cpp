#include "usv/mechanism.hpp"

#include <cmath>
#include <string>

namespace usv {
namespace {

double checked_asin(double arg, const char* what) {
  if (arg < -1.0 || arg > 1.0) {
    throw std::domain_error(std::string("mechanism: ") + what + " arcsine argument " +
                            std::to_string(arg) + " outside [-1, 1]; rod lengths and joint offsets are inconsistent");
  }
  return std::asin(arg);
}

}  // namespace

double mechanism_reach(const MechanismGeometry& geom, double theta1) {
  // Upper-rod angle and outer-rod angle follow from the joint chain closure.
  const double theta2 = -checked_asin(geom.l1 / geom.l2 * std::sin(theta1) + geom.y_p0 / geom.l2, "theta2");
  const double theta4 = checked_asin(-geom.l1 * geom.l3 / (geom.l2 * geom.l4) * std::sin(theta1) +
                                         geom.y_p0 / geom.l2 + geom.y_p4 / geom.l4,
                                     "theta4");
  return geom.l1 * std::cos(theta1) + (geom.l2 + geom.l3) * std::cos(theta2) + geom.l4 * std::cos(theta4);
}

MechanismGeometry MechanismGeometry::make(double l1, double l2, double l3, double l4, double y_p0,
                                          double y_p4, double theta_min, double theta_max) {
  MechanismGeometry g;
  g.l1 = l1;
  g.l2 = l2;
  g.l3 = l3;
  g.l4 = l4;
  g.y_p0 = y_p0;
  g.y_p4 = y_p4;
  g.theta_min = theta_min;
  g.theta_max = theta_max;
  if (!(l1 > 0 && l2 > 0 && l3 > 0 && l4 > 0)) {
    throw std::domain_error("mechanism: rod lengths must be positive");
  }
  if (!(theta_min >= 0.0 && theta_min < theta_max && theta_max < kPi / 2.0)) {
    throw std::domain_error("mechanism: need 0 <= theta_min < theta_max < pi/2");
  }

  // Scan the input range: locate the retracted reach and require the
  // forward map to be strictly decreasing, which the inverse relies on.
  const int n = 2000;
  double prev = mechanism_reach(g, theta_min);
  double min_reach = prev;
  for (int i = 1; i <= n; ++i) {
    const double th = theta_min + (theta_max - theta_min) * static_cast<double>(i) / n;
    const double reach = mechanism_reach(g, th);
    if (reach >= prev) {
      throw std::domain_error("mechanism: reach is not strictly decreasing in theta1 over the input range");
    }
    min_reach = std::min(min_reach, reach);
    prev = reach;
  }
  g.x_retract = min_reach;
  return g;
}

MechanismGeometry MechanismGeometry::standard() {
  return make(0.19, 0.19, 0.19, 0.19, 0.0, 0.0, 0.0, deg2rad(70.0));
}

MechanismPose mechanism_forward(const MechanismGeometry& geom, double theta1) {
  if (!(theta1 >= geom.theta_min && theta1 <= geom.theta_max)) {
    throw std::out_of_range("mechanism_forward: theta1 = " + std::to_string(theta1) +
                            " outside [" + std::to_string(geom.theta_min) + ", " +
                            std::to_string(geom.theta_max) + "]");
  }
  MechanismPose out;
  out.x_p4 = mechanism_reach(geom, theta1);
  out.extension = out.x_p4 - geom.x_retract;
  return out;
}

double mechanism_max_extension(const MechanismGeometry& geom) {
  return mechanism_forward(geom, geom.theta_min).extension;
}

double mechanism_inverse(const MechanismGeometry& geom, double l) {
  const double l_max = mechanism_max_extension(geom);
  if (!(l >= 0.0 && l <= l_max)) {
    throw std::out_of_range("mechanism_inverse: l = " + std::to_string(l) +
                            " outside achievable range [0, " + std::to_string(l_max) + "]");
  }
  // Reach decreases with theta1, so the extension does too.
  double lo = geom.theta_min;   // extension(lo) = l_max
  double hi = geom.theta_max;   // extension(hi) = 0
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double ext = mechanism_forward(geom, mid).extension;
    if (ext > l) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-12) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace usv
