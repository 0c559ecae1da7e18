#pragma once

#include <string>
#include <vector>

#include "usv/types.hpp"

namespace usv {

struct RefSample {
  double t = 0.0;
  Vec6 q = Vec6::Zero();  // x, y, psi, u, v, r
};

/// Sampled reference for tracking. Yaw targets are wrapped; velocity
/// targets come from finite differences of the pose samples, expressed in
/// the reference body frame.
struct ReferenceTrajectory {
  std::string shape;
  double dt = 0.0;
  std::vector<RefSample> samples;
  std::vector<double> corner_times;  // square/hourglass segment switches

  double duration() const {
    return samples.empty() ? 0.0 : samples.back().t;
  }

  /// Linear interpolation; yaw interpolated along the short way; clamped
  /// at both ends.
  Vec6 sample_at(double t) const;

  Pose pose_at(double t) const {
    const Vec6 q = sample_at(t);
    return Pose(q[0], q[1], q[2]);
  }
};

/// Counterclockwise circle centered at origin, starting on its +x axis,
/// heading tangent to the path.
ReferenceTrajectory build_circle(double radius, double speed,
                                 const Eigen::Vector2d& origin, double dt,
                                 int laps = 1);

/// Axis-aligned square with corner (0,0) at origin, traversed
/// counterclockwise at constant speed, heading segment-aligned.
ReferenceTrajectory build_square(double side, double speed,
                                 const Eigen::Vector2d& origin, double dt,
                                 int laps = 1);

/// Two touching triangles spanning a size x size box centered at origin;
/// the diagonals cross once per lap at the waist.
ReferenceTrajectory build_hourglass(double size, double speed,
                                    const Eigen::Vector2d& origin, double dt,
                                    int laps = 1);

/// Straight run from the start pose to the goal pose at the approach
/// speed, heading fixed at the goal heading, then a hold tail for
/// settling.
ReferenceTrajectory build_dock_approach(const Pose& start, const Pose& goal,
                                        double speed, double dt,
                                        double hold = 10.0);

/// Dispatch by shape name {circle, square, hourglass}; size is the
/// radius or the side length.
ReferenceTrajectory build_reference(const std::string& shape, double size,
                                    double speed,
                                    const Eigen::Vector2d& origin, double dt,
                                    int laps = 1);

/// Piecewise-linear path through waypoints at constant speed with
/// segment-aligned heading; shared backend for square and hourglass.
ReferenceTrajectory build_polyline(const std::string& shape,
                                   const std::vector<Eigen::Vector2d>& points,
                                   double speed, double dt, int laps);

}  // namespace usv
