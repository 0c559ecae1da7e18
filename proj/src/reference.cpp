#include "usv/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "usv/angles.hpp"
#include "usv/dynamics.hpp"

namespace usv {

namespace {

/// Fills the velocity entries from finite differences of the pose
/// samples: body-frame (u, v) via R(psi)' and wrapped yaw-rate.
void fill_velocity_refs(ReferenceTrajectory& ref) {
  const size_t n = ref.samples.size();
  if (n < 2) return;
  for (size_t i = 0; i < n; ++i) {
    const size_t a = i == 0 ? 0 : i - 1;
    const size_t b = i + 1 == n ? i : i + 1;
    const double span = ref.samples[b].t - ref.samples[a].t;
    if (span <= 0.0) continue;
    const double dx = ref.samples[b].q[0] - ref.samples[a].q[0];
    const double dy = ref.samples[b].q[1] - ref.samples[a].q[1];
    const double dpsi =
        angle_diff(ref.samples[b].q[2], ref.samples[a].q[2]);
    const double psi = ref.samples[i].q[2];
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    ref.samples[i].q[3] = (c * dx + s * dy) / span;
    ref.samples[i].q[4] = (-s * dx + c * dy) / span;
    ref.samples[i].q[5] = dpsi / span;
  }
}

}  // namespace

Vec6 ReferenceTrajectory::sample_at(double t) const {
  if (samples.empty()) {
    throw std::logic_error("reference has no samples");
  }
  if (t <= samples.front().t) return samples.front().q;
  if (t >= samples.back().t) {
    Vec6 q = samples.back().q;
    q[3] = q[4] = q[5] = 0.0;  // hold at the end point
    return q;
  }
  const size_t hi = static_cast<size_t>(
      std::upper_bound(samples.begin(), samples.end(), t,
                       [](double value, const RefSample& s) {
                         return value < s.t;
                       }) -
      samples.begin());
  const RefSample& a = samples[hi - 1];
  const RefSample& b = samples[hi];
  const double w = (t - a.t) / (b.t - a.t);
  Vec6 q = (1.0 - w) * a.q + w * b.q;
  q[2] = wrap_angle(a.q[2] + w * angle_diff(b.q[2], a.q[2]));
  return q;
}

ReferenceTrajectory build_circle(double radius, double speed,
                                 const Eigen::Vector2d& origin, double dt,
                                 int laps) {
  if (!(radius > 0.0) || !(speed > 0.0) || !(dt > 0.0) || laps < 1) {
    throw std::invalid_argument("circle reference: radius, speed, dt, laps must be positive");
  }
  ReferenceTrajectory ref;
  ref.shape = "circle";
  ref.dt = dt;
  const double period = 2.0 * kPi * radius / speed;
  const double total = period * laps;
  const size_t n = static_cast<size_t>(std::ceil(total / dt)) + 1;
  const double omega = speed / radius;
  for (size_t i = 0; i < n; ++i) {
    const double t = std::min(i * dt, total);
    const double a = omega * t;
    RefSample s;
    s.t = t;
    s.q[0] = origin.x() + radius * std::cos(a);
    s.q[1] = origin.y() + radius * std::sin(a);
    s.q[2] = wrap_angle(a + kPi / 2.0);  // tangent, counterclockwise
    ref.samples.push_back(s);
  }
  fill_velocity_refs(ref);
  return ref;
}

ReferenceTrajectory build_polyline(const std::string& shape,
                                   const std::vector<Eigen::Vector2d>& points,
                                   double speed, double dt, int laps) {
  if (points.size() < 2) {
    throw std::invalid_argument("polyline reference: need at least 2 points");
  }
  if (!(speed > 0.0) || !(dt > 0.0) || laps < 1) {
    throw std::invalid_argument("polyline reference: speed, dt, laps must be positive");
  }
  ReferenceTrajectory ref;
  ref.shape = shape;
  ref.dt = dt;

  double t0 = 0.0;
  for (int lap = 0; lap < laps; ++lap) {
    for (size_t seg = 0; seg + 1 < points.size(); ++seg) {
      const Eigen::Vector2d a = points[seg];
      const Eigen::Vector2d b = points[seg + 1];
      const double len = (b - a).norm();
      if (!(len > 0.0)) {
        throw std::invalid_argument("polyline reference: zero-length segment");
      }
      const double heading = std::atan2(b.y() - a.y(), b.x() - a.x());
      const double seg_time = len / speed;
      if (!(lap == 0 && seg == 0)) ref.corner_times.push_back(t0);
      const size_t steps = static_cast<size_t>(std::ceil(seg_time / dt));
      for (size_t i = 0; i < steps; ++i) {
        const double tau = std::min(i * dt, seg_time);
        const Eigen::Vector2d p = a + (tau / seg_time) * (b - a);
        RefSample s;
        s.t = t0 + tau;
        s.q[0] = p.x();
        s.q[1] = p.y();
        s.q[2] = heading;
        ref.samples.push_back(s);
      }
      t0 += seg_time;
    }
  }
  // Close with the final waypoint.
  RefSample last;
  last.t = t0;
  last.q[0] = points.back().x();
  last.q[1] = points.back().y();
  const Eigen::Vector2d tail =
      points.back() - points[points.size() - 2];
  last.q[2] = std::atan2(tail.y(), tail.x());
  ref.samples.push_back(last);

  // Drop duplicate timestamps introduced by exact segment multiples.
  std::vector<RefSample> dedup;
  for (const RefSample& s : ref.samples) {
    if (!dedup.empty() && s.t <= dedup.back().t + 1e-12) {
      dedup.back() = s;
      continue;
    }
    dedup.push_back(s);
  }
  ref.samples = std::move(dedup);
  fill_velocity_refs(ref);
  return ref;
}

ReferenceTrajectory build_square(double side, double speed,
                                 const Eigen::Vector2d& origin, double dt,
                                 int laps) {
  if (!(side > 0.0)) {
    throw std::invalid_argument("square reference: side must be positive");
  }
  const std::vector<Eigen::Vector2d> pts = {
      origin,
      origin + Eigen::Vector2d(side, 0.0),
      origin + Eigen::Vector2d(side, side),
      origin + Eigen::Vector2d(0.0, side),
      origin,
  };
  return build_polyline("square", pts, speed, dt, laps);
}

ReferenceTrajectory build_hourglass(double size, double speed,
                                    const Eigen::Vector2d& origin, double dt,
                                    int laps) {
  if (!(size > 0.0)) {
    throw std::invalid_argument("hourglass reference: size must be positive");
  }
  const double h = size / 2.0;
  // Two touching triangles; segments 1 and 3 are the crossing diagonals.
  const std::vector<Eigen::Vector2d> pts = {
      origin + Eigen::Vector2d(-h, -h),
      origin + Eigen::Vector2d(h, h),
      origin + Eigen::Vector2d(h, -h),
      origin + Eigen::Vector2d(-h, h),
      origin + Eigen::Vector2d(-h, -h),
  };
  return build_polyline("hourglass", pts, speed, dt, laps);
}

ReferenceTrajectory build_dock_approach(const Pose& start, const Pose& goal,
                                        double speed, double dt, double hold) {
  if (!(speed > 0.0) || !(dt > 0.0) || hold < 0.0) {
    throw std::invalid_argument("dock approach: speed, dt positive, hold >= 0");
  }
  ReferenceTrajectory ref;
  ref.shape = "dock_approach";
  ref.dt = dt;
  const Eigen::Vector2d a = start.position();
  const Eigen::Vector2d b = goal.position();
  const double len = (b - a).norm();
  const double travel = len > 0.0 ? len / speed : 0.0;
  const double total = travel + hold;
  const size_t n = static_cast<size_t>(std::ceil(total / dt)) + 1;
  for (size_t i = 0; i < n; ++i) {
    const double t = std::min(i * dt, total);
    RefSample s;
    s.t = t;
    if (t >= travel || travel == 0.0) {
      s.q[0] = b.x();
      s.q[1] = b.y();
    } else {
      const Eigen::Vector2d p = a + (t / travel) * (b - a);
      s.q[0] = p.x();
      s.q[1] = p.y();
    }
    s.q[2] = goal.psi;
    ref.samples.push_back(s);
  }
  fill_velocity_refs(ref);
  return ref;
}

ReferenceTrajectory build_reference(const std::string& shape, double size,
                                    double speed,
                                    const Eigen::Vector2d& origin, double dt,
                                    int laps) {
  if (shape == "circle") return build_circle(size, speed, origin, dt, laps);
  if (shape == "square") return build_square(size, speed, origin, dt, laps);
  if (shape == "hourglass") {
    return build_hourglass(size, speed, origin, dt, laps);
  }
  throw std::invalid_argument("unknown reference shape: " + shape);
}

}  // namespace usv
