#pragma once

#include <map>
#include <string>
#include <vector>

#include "usv/types.hpp"

namespace usv {

struct SimEvent {
  double t = 0.0;
  std::string kind;    // "clamp", "capture", "expansion", "solver", ...
  std::string detail;
};

struct SimSample {
  double t = 0.0;
  VesselState state;
  Vec4 command = Vec4::Zero();      // thruster forces after clamping [N]
  Vec3 applied = Vec3::Zero();      // E * command [N, N, N m]
  Vec3 disturbance = Vec3::Zero();  // additive body force [N, N, N m]
};

/// Fixed-rate run record. CSV columns, in order:
///   t, x, y, psi, u, v, r, f1, f2, f3, f4, Fx, Fy, Mz, dx, dy, dm, l
/// where (Fx, Fy, Mz) is the applied thrust wrench, (dx, dy, dm) the
/// disturbance wrench, and l the expansion length.
struct SimLog {
  double dt = 0.0;
  std::vector<SimSample> samples;
  std::vector<SimEvent> events;
  std::map<std::string, std::string> meta;

  double duration() const {
    return samples.empty() ? 0.0 : samples.back().t;
  }
  bool has_event(const std::string& kind) const;
  std::vector<const SimEvent*> events_of(const std::string& kind) const;

  /// Doubles are printed with %.17g, so identical runs serialize to
  /// identical bytes.
  void write_csv(const std::string& path) const;
  void write_events_json(const std::string& path) const;

  static SimLog read_csv(const std::string& path);
};

}  // namespace usv
