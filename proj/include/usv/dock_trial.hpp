#pragma once

#include <cstdint>
#include <string>

#include "usv/dock.hpp"
#include "usv/sim_log.hpp"
#include "usv/simulator.hpp"
#include "usv/vessel_config.hpp"
#include "usv/wave.hpp"

namespace usv {

/// One Monte Carlo docking trial: start a little over a metre out with a
/// randomized pose, transit to the preparation point in front of the
/// port, then creep in until the capture window holds. The same master
/// seed and trial index reproduce the same start pose and wave
/// realization regardless of form, so form comparisons are paired.
struct DockTrialConfig {
  VesselConfig vessel;
  double expansion = 0.0;        // form held for the whole trial
  WaveDisturbance waves;         // seed is overridden per trial
  uint64_t seed = 0;             // master seed
  std::string controller = "nmpc";  // or "pid"
  double transit_speed = 0.25;   // m/s to the preparation point
  double approach_speed = 0.06;  // m/s on the final leg
  double prep_offset = 0.4;      // m, preparation point from the port
  double start_offset = 1.2;     // m, nominal start distance
  double timeout = 90.0;         // s, whole-trial budget
  DockPort port = default_port();

  static DockPort default_port() {
    DockPort p;
    p.x = 2.0;
    p.y = 0.0;
    p.facing = 0.0;
    return p;
  }

  void validate() const;
};

struct DockTrialResult {
  bool success = false;
  double time_to_dock = 0.0;     // s; the timeout when not captured
  std::string failure_reason;    // empty on success
  SimLog log;
};

DockTrialResult run_dock_trial(const DockTrialConfig& cfg,
                               uint64_t trial_index);

}  // namespace usv
