#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "usv/dock.hpp"
#include "usv/sim_log.hpp"
#include "usv/types.hpp"
#include "usv/vessel_config.hpp"
#include "usv/wave.hpp"

namespace usv {

/// One plant step: clamp the command, apply thrust plus disturbance, and
/// integrate. Expansion is untouched; the engine owns its slew.
struct StepResult {
  VesselState state;
  Vec4 command = Vec4::Zero();  // after clamping
  Vec3 applied = Vec3::Zero();  // thrust wrench E * command
  bool clamped = false;
};

StepResult sim_step(const VesselState& s, const Vec4& u_cmd,
                    const Vec3& disturbance, double dt,
                    const VesselConfig& cfg);

/// Closed-loop command source. Implementations keep their own state
/// (warm starts, integrators) and must not be shared across runs.
class Controller {
 public:
  struct Output {
    Vec4 u = Vec4::Zero();
    std::vector<SimEvent> events;  // solver diagnostics etc., t filled by caller
  };

  virtual ~Controller() = default;
  virtual Output command(const VesselState& s, double t) = 0;
  virtual void reset() {}
};

/// Open-loop thrust program.
class ThrustProgram : public Controller {
 public:
  using Fn = std::function<Vec4(double)>;
  explicit ThrustProgram(Fn fn) : fn_(std::move(fn)) {}
  Output command(const VesselState&, double t) override {
    return Output{fn_(t), {}};
  }

 private:
  Fn fn_;
};

struct ExpansionCommand {
  double t = 0.0;
  double target = 0.0;  // m
};

struct Scenario {
  VesselConfig vessel;
  VesselState initial;
  double duration = 60.0;
  double dt = 0.02;          // physics step [s]
  int control_divisor = 5;   // controller fires every control_divisor steps
  WaveDisturbance waves;
  std::vector<DockPort> ports;
  std::vector<ExpansionCommand> expansion_schedule;  // ascending t
  double expansion_rate = 0.05;  // m/s, mechanism servo bound
  double payload_mass = 0.0;     // kg, applied while carrying
  double payload_yaw_inertia = 0.0;  // kg m^2
  bool stop_on_capture = false;

  void validate() const;
  double control_period() const { return dt * control_divisor; }
};

/// Steppable deterministic engine. Sample k records the state, command,
/// and wrenches at t_k; the step then advances to t_{k+1}. The hydro
/// parameters used for the step are evaluated at the expansion recorded
/// in that same sample.
class SimEngine {
 public:
  explicit SimEngine(const Scenario& scenario);

  const Scenario& scenario() const { return scenario_; }
  const VesselState& state() const { return state_; }
  double time() const { return step_count_ * scenario_.dt; }
  size_t step_count() const { return step_count_; }

  /// Target is clamped to the supported expansion range; the hull slews
  /// toward it at the configured rate.
  void set_expansion_target(double l);
  double expansion_target() const { return expansion_target_; }

  void set_carrying(bool on);
  bool carrying() const { return carrying_; }

  /// Parameters at the current expansion, payload included when carrying.
  HydroParams params() const;

  void add_event(const std::string& kind, const std::string& detail);

  /// Advances one physics step under the given command.
  void step(const Vec4& u_cmd);

  /// Ports captured on the most recent step (transition edges only).
  const std::vector<size_t>& new_captures() const { return new_captures_; }
  bool port_captured(size_t index) const { return captured_.at(index); }
  bool any_captured() const;
  const CaptureResult& capture_status(size_t index) const {
    return capture_status_.at(index);
  }
  /// Forgets capture state, e.g. after undocking from a port.
  void reset_capture(size_t index);

  const SimLog& log() const { return log_; }
  SimLog take_log() { return std::move(log_); }

 private:
  void apply_schedule();

  Scenario scenario_;
  WaveField waves_;
  VesselState state_;
  double expansion_target_ = 0.0;
  bool carrying_ = false;
  bool clamp_active_ = false;
  size_t step_count_ = 0;
  size_t schedule_index_ = 0;
  std::vector<CaptureMonitor> monitors_;
  std::vector<bool> captured_;
  std::vector<CaptureResult> capture_status_;
  std::vector<size_t> new_captures_;
  SimLog log_;
};

/// Runs the scenario to its duration (or first capture when
/// stop_on_capture). Controller exceptions become "controller_error"
/// events; the last command is held.
SimLog run_scenario(const Scenario& scenario, Controller& controller);

}  // namespace usv
