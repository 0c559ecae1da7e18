#pragma once

#include "usv/reference.hpp"
#include "usv/sim_log.hpp"

namespace usv {

struct TrackingMetrics {
  double mae_position = 0.0;  // m, mean of planar distance to reference
  double mae_yaw = 0.0;       // rad, mean absolute wrapped yaw error
  double effort = 0.0;        // integral of u'u dt, trapezoidal
};

/// Compares the run against the reference at the logged timestamps.
/// Throws std::invalid_argument when the log is empty or extends beyond
/// the reference by more than one sample.
TrackingMetrics tracking_metrics(const SimLog& log,
                                 const ReferenceTrajectory& ref);

/// Effort alone, for logs without a reference.
double control_effort(const SimLog& log);

}  // namespace usv
