#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usv/types.hpp"
#include "usv/vessel_config.hpp"

namespace usv {

enum class ManeuverKind { straight, circle, spin };

const char* maneuver_kind_name(ManeuverKind kind);
ManeuverKind maneuver_kind_from_name(const std::string& name);

struct ManeuverSample {
  double t = 0.0;
  VesselState state;
  Vec4 u = Vec4::Zero();
};

/// Open-loop run at one fixed expansion, used as identification data.
/// CSV columns, in order: t, x, y, psi, u, v, r, f1, f2, f3, f4, l.
struct ManeuverLog {
  ManeuverKind kind = ManeuverKind::straight;
  double expansion = 0.0;
  double dt = 0.0;

  std::vector<ManeuverSample> samples;

  void write_csv(const std::string& path) const;
  static ManeuverLog read_csv(const std::string& path);
};

struct ManeuverOptions {
  double duration = 20.0;
  double dt = 0.05;
  /// Measurement noise on logged body velocities: per-component standard
  /// deviation as a fraction of that component's RMS over the clean run.
  double velocity_noise_rel = 0.0;
  /// Halve the drive level halfway through, for richer excitation.
  bool step_change = true;
};

/// Thrust program for one kind. Drive levels step down at duration/2 when
/// step_change is set. The spin pattern u = [-f, -f, f, f] produces a pure
/// moment; straight keeps Fy = Mz = 0; circle combines surge and moment.
Vec4 maneuver_command(ManeuverKind kind, double t, const ManeuverOptions& opt);

ManeuverLog generate_maneuver_log(const VesselConfig& truth, ManeuverKind kind,
                                  double expansion, const ManeuverOptions& opt,
                                  uint64_t seed);

/// One log per kind, seeds derived per kind index.
std::vector<ManeuverLog> generate_maneuver_logs(const VesselConfig& truth,
                                                double expansion,
                                                const ManeuverOptions& opt,
                                                uint64_t seed);

}  // namespace usv
