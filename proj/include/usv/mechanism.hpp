#pragma once

#include <stdexcept>

#include "usv/angles.hpp"

namespace usv {

/// Extension mechanism of one outrigger: a double-decked scissor linkage
/// driven by a single input angle. The geometry below follows the linkage
/// joint chain P0..P4; theta1 is the driven rod angle.
struct MechanismGeometry {
  double l1 = 0.19;  // rod lengths [m]
  double l2 = 0.19;
  double l3 = 0.19;
  double l4 = 0.19;
  double y_p0 = 0.0;  // joint offsets along the linkage Y axis [m]
  double y_p4 = 0.0;
  double theta_min = 0.0;             // input angle range [rad]
  double theta_max = deg2rad(70.0);
  double x_retract = 0.0;             // minimum output reach, derived

  /// Build and validate a geometry; recomputes x_retract and checks that
  /// the forward map is monotone decreasing over the angle range.
  static MechanismGeometry make(double l1, double l2, double l3, double l4, double y_p0,
                                double y_p4, double theta_min, double theta_max);

  /// Stock symmetric linkage: 0.19 m rods, zero offsets, 0..70 degrees.
  static MechanismGeometry standard();
};

struct MechanismPose {
  double x_p4 = 0.0;      // output joint reach along the linkage X axis [m]
  double extension = 0.0; // expansion length l = x_p4 - x_retract [m]
};

/// Output reach for input angle theta1, before subtracting the retracted
/// reach. Throws std::domain_error when the rod geometry puts an arcsine
/// argument outside [-1, 1].
double mechanism_reach(const MechanismGeometry& geom, double theta1);

/// Forward kinematics: input angle -> (reach, expansion length).
MechanismPose mechanism_forward(const MechanismGeometry& geom, double theta1);

/// Largest achievable expansion (at theta_min for a monotone-decreasing map).
double mechanism_max_extension(const MechanismGeometry& geom);

/// Inverse kinematics by bisection on the monotone forward map.
/// |forward(result).extension - l| <= 1e-6 m. Throws std::out_of_range
/// when l is not achievable.
double mechanism_inverse(const MechanismGeometry& geom, double l);

}  // namespace usv
