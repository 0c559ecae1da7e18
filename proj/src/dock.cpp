#include "usv/dock.hpp"

#include <cmath>
#include <stdexcept>

namespace usv {

void DockPort::validate(double dt) const {
  if (!(capture_longitudinal > 0.0) || !(capture_lateral > 0.0) ||
      !(capture_yaw > 0.0)) {
    throw std::invalid_argument("DockPort: capture window must be strictly positive");
  }
  if (!(approach_speed_cap > 0.0)) {
    throw std::invalid_argument("DockPort: approach_speed_cap must be positive");
  }
  if (!(dwell >= dt)) {
    throw std::invalid_argument("DockPort: dwell must cover at least one step");
  }
}

DockAlignment dock_alignment(const Pose& pose, const BodyVelocity& vel,
                             const DockPort& port) {
  const double dx = pose.x - port.x;
  const double dy = pose.y - port.y;
  const double c = std::cos(port.facing);
  const double s = std::sin(port.facing);
  DockAlignment a;
  a.longitudinal = c * dx + s * dy;
  a.lateral = -s * dx + c * dy;
  a.yaw_error = angle_diff(pose.psi, port.facing);
  a.speed = std::hypot(vel.u, vel.v);
  a.in_window = std::abs(a.longitudinal) <= port.capture_longitudinal &&
                std::abs(a.lateral) <= port.capture_lateral &&
                std::abs(a.yaw_error) <= port.capture_yaw &&
                a.speed <= port.approach_speed_cap;
  return a;
}

namespace {

std::string violation_reason(const DockAlignment& a, const DockPort& port) {
  if (std::abs(a.longitudinal) > port.capture_longitudinal) return "longitudinal";
  if (std::abs(a.lateral) > port.capture_lateral) return "lateral";
  if (std::abs(a.yaw_error) > port.capture_yaw) return "yaw";
  if (a.speed > port.approach_speed_cap) return "speed";
  return "dwell";
}

CaptureResult verdict(const DockAlignment& newest, int streak,
                      const DockPort& port, double dt) {
  CaptureResult res;
  res.held = streak * dt;
  if (res.held >= port.dwell) {
    res.captured = true;
    return res;
  }
  res.reason = violation_reason(newest, port);
  return res;
}

}  // namespace

CaptureResult docking_capture_check(const std::vector<DockSample>& history,
                                    const DockPort& port, double dt) {
  port.validate(dt);
  if (history.empty()) {
    CaptureResult res;
    res.reason = "dwell";
    return res;
  }
  int streak = 0;
  DockAlignment newest;
  for (size_t i = history.size(); i-- > 0;) {
    const DockAlignment a =
        dock_alignment(history[i].pose, history[i].vel, port);
    if (i == history.size() - 1) newest = a;
    if (!a.in_window) break;
    ++streak;
  }
  return verdict(newest, streak, port, dt);
}

CaptureMonitor::CaptureMonitor(const DockPort& port, double dt)
    : port_(port), dt_(dt) {
  port_.validate(dt);
}

CaptureResult CaptureMonitor::update(const Pose& pose,
                                     const BodyVelocity& vel) {
  last_ = dock_alignment(pose, vel, port_);
  has_last_ = true;
  streak_ = last_.in_window ? streak_ + 1 : 0;
  return verdict(last_, streak_, port_, dt_);
}

void CaptureMonitor::reset() {
  streak_ = 0;
  has_last_ = false;
}

}  // namespace usv
