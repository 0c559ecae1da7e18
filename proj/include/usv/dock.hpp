#pragma once

#include <string>
#include <vector>

#include "usv/types.hpp"

namespace usv {

/// Holding forces of the magnetic latch once engaged, by direction and
/// mating material. Carried as data; capture logic does not consume them.
struct LatchForces {
  double longitudinal_on_magnet = 570.0;  // N
  double lateral_on_magnet = 150.0;       // N
  double longitudinal_on_ferro = 340.0;   // N
  double lateral_on_ferro = 67.0;         // N
};

/// A docking station: target pose plus the capture window. The boat is
/// captured when its pose, expressed in the port frame, stays inside the
/// window at low speed for the dwell time.
struct DockPort {
  double x = 0.0;
  double y = 0.0;
  double facing = 0.0;              // rad, required boat heading at capture
  double capture_longitudinal = 0.04;  // m
  double capture_lateral = 0.025;      // m
  double capture_yaw = deg2rad(15.0);  // rad
  double approach_speed_cap = 0.1;     // m/s, planar body speed
  double dwell = 0.5;                  // s
  LatchForces latch;

  /// Window strictly positive, dwell at least one simulation step.
  void validate(double dt) const;

  Pose pose() const { return Pose(x, y, facing); }
};

/// Instantaneous alignment of a vessel pose against a port.
struct DockAlignment {
  double longitudinal = 0.0;  // m, along the port facing
  double lateral = 0.0;       // m, across the port facing
  double yaw_error = 0.0;     // rad, wrapped
  double speed = 0.0;         // m/s, |(u, v)|
  bool in_window = false;
};

DockAlignment dock_alignment(const Pose& pose, const BodyVelocity& vel,
                             const DockPort& port);

struct DockSample {
  double t = 0.0;
  Pose pose;
  BodyVelocity vel;
};

struct CaptureResult {
  bool captured = false;
  std::string reason;   // first violated criterion when not captured
  double held = 0.0;    // s of trailing in-window alignment
};

/// Evaluates the capture condition on a sampled history (uniform spacing
/// dt). Held time counts trailing consecutive in-window samples; capture
/// requires held >= dwell. When not captured, the reason names the first
/// violated criterion on the newest sample, in the order longitudinal,
/// lateral, yaw, speed; an aligned but short history reports "dwell".
CaptureResult docking_capture_check(const std::vector<DockSample>& history,
                                    const DockPort& port, double dt);

/// Incremental form of the same rule for use inside the engine loop.
class CaptureMonitor {
 public:
  CaptureMonitor(const DockPort& port, double dt);

  /// Feeds one sample; returns the rolling capture verdict.
  CaptureResult update(const Pose& pose, const BodyVelocity& vel);

  void reset();
  const DockPort& port() const { return port_; }

 private:
  DockPort port_;
  double dt_;
  int streak_ = 0;
  DockAlignment last_;
  bool has_last_ = false;
};

}  // namespace usv
