#include "usv/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "usv/angles.hpp"

namespace usv {

double control_effort(const SimLog& log) {
  double effort = 0.0;
  for (size_t i = 1; i < log.samples.size(); ++i) {
    const double a = log.samples[i - 1].command.squaredNorm();
    const double b = log.samples[i].command.squaredNorm();
    effort += 0.5 * (a + b) * (log.samples[i].t - log.samples[i - 1].t);
  }
  return effort;
}

TrackingMetrics tracking_metrics(const SimLog& log,
                                 const ReferenceTrajectory& ref) {
  if (log.samples.empty()) {
    throw std::invalid_argument("tracking_metrics: empty log");
  }
  if (log.samples.back().t > ref.duration() + log.dt + 1e-9) {
    throw std::invalid_argument(
        "tracking_metrics: log extends beyond the reference");
  }
  TrackingMetrics m;
  for (const SimSample& s : log.samples) {
    const Vec6 q_ref = ref.sample_at(s.t);
    m.mae_position +=
        std::hypot(s.state.pose.x - q_ref[0], s.state.pose.y - q_ref[1]);
    m.mae_yaw += std::abs(angle_diff(s.state.pose.psi, q_ref[2]));
  }
  const double n = static_cast<double>(log.samples.size());
  m.mae_position /= n;
  m.mae_yaw /= n;
  m.effort = control_effort(log);
  return m;
}

}  // namespace usv
