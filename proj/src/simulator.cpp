#include "usv/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "usv/dynamics.hpp"
#include "usv/propulsion.hpp"

namespace usv {

StepResult sim_step(const VesselState& s, const Vec4& u_cmd,
                    const Vec3& disturbance, double dt,
                    const VesselConfig& cfg) {
  StepResult out;
  auto [u, clamped] = clamp_thrust(u_cmd, cfg.f_max);
  out.command = u;
  out.clamped = clamped;
  out.applied = allocation(u, cfg.thruster_arm(s.expansion));
  const HydroParams p = cfg.params_at(s.expansion);
  out.state = integrate_rk4(s, p, out.applied, dt, &disturbance);
  out.state.expansion = s.expansion;
  return out;
}

void Scenario::validate() const {
  vessel.validate();
  initial.validate();
  if (!(duration > 0.0)) throw std::invalid_argument("scenario.duration: must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("scenario.dt: must be positive");
  if (control_divisor < 1) throw std::invalid_argument("scenario.control_divisor: must be >= 1");
  if (!(expansion_rate > 0.0)) throw std::invalid_argument("scenario.expansion_rate: must be positive");
  if (payload_mass < 0.0 || payload_yaw_inertia < 0.0) {
    throw std::invalid_argument("scenario.payload: must be nonnegative");
  }
  for (const DockPort& p : ports) p.validate(dt);
  for (size_t i = 0; i < expansion_schedule.size(); ++i) {
    const ExpansionCommand& c = expansion_schedule[i];
    if (c.t < 0.0) throw std::invalid_argument("scenario.expansion_schedule: negative time");
    if (i > 0 && c.t < expansion_schedule[i - 1].t) {
      throw std::invalid_argument("scenario.expansion_schedule: times must ascend");
    }
    if (c.target < 0.0 || c.target > kMaxExpansion) {
      throw std::invalid_argument("scenario.expansion_schedule: target outside [0, 0.5]");
    }
  }
}

SimEngine::SimEngine(const Scenario& scenario)
    : scenario_(scenario), waves_(scenario.waves), state_(scenario.initial) {
  scenario_.validate();
  expansion_target_ = state_.expansion;
  for (const DockPort& p : scenario_.ports) {
    monitors_.emplace_back(p, scenario_.dt);
    captured_.push_back(false);
    capture_status_.emplace_back();
  }
  log_.dt = scenario_.dt;
  log_.samples.reserve(
      static_cast<size_t>(scenario_.duration / scenario_.dt) + 2);
}

void SimEngine::set_expansion_target(double l) {
  const double clamped = std::clamp(l, 0.0, kMaxExpansion);
  if (clamped == expansion_target_) return;
  expansion_target_ = clamped;
  std::ostringstream ss;
  ss << "target " << clamped;
  add_event("expansion", ss.str());
}

void SimEngine::set_carrying(bool on) {
  if (on == carrying_) return;
  carrying_ = on;
  add_event("payload", on ? "attached" : "released");
}

HydroParams SimEngine::params() const {
  HydroParams p = scenario_.vessel.params_at(state_.expansion);
  if (carrying_) {
    p = p.with_payload(scenario_.payload_mass, scenario_.payload_yaw_inertia);
  }
  return p;
}

void SimEngine::add_event(const std::string& kind, const std::string& detail) {
  log_.events.push_back(SimEvent{time(), kind, detail});
}

void SimEngine::apply_schedule() {
  const double t = time();
  while (schedule_index_ < scenario_.expansion_schedule.size() &&
         scenario_.expansion_schedule[schedule_index_].t <= t) {
    set_expansion_target(scenario_.expansion_schedule[schedule_index_].target);
    ++schedule_index_;
  }
}

bool SimEngine::any_captured() const {
  for (bool c : captured_) {
    if (c) return true;
  }
  return false;
}

void SimEngine::reset_capture(size_t index) {
  captured_.at(index) = false;
  capture_status_.at(index) = CaptureResult{};
  monitors_.at(index).reset();
}

void SimEngine::step(const Vec4& u_cmd) {
  const double t = time();
  apply_schedule();

  // Slew the hull toward the expansion target under the servo rate bound.
  const double max_dl = scenario_.expansion_rate * scenario_.dt;
  const double dl =
      std::clamp(expansion_target_ - state_.expansion, -max_dl, max_dl);
  state_.expansion += dl;

  auto [u, clamped] = clamp_thrust(u_cmd, scenario_.vessel.f_max);
  if (clamped && !clamp_active_) {
    add_event("clamp", "command exceeded thruster limits");
  }
  clamp_active_ = clamped;

  const Vec3 d = waves_.force(t);
  const double arm = scenario_.vessel.thruster_arm(state_.expansion);
  const Vec3 applied = allocation(u, arm);

  SimSample sample;
  sample.t = t;
  sample.state = state_;
  sample.command = u;
  sample.applied = applied;
  sample.disturbance = d;
  log_.samples.push_back(sample);

  const double l = state_.expansion;
  state_ = integrate_rk4(state_, params(), applied, scenario_.dt, &d);
  state_.expansion = l;
  ++step_count_;

  new_captures_.clear();
  for (size_t i = 0; i < monitors_.size(); ++i) {
    const CaptureResult res = monitors_[i].update(state_.pose, state_.vel);
    capture_status_[i] = res;
    if (res.captured && !captured_[i]) {
      captured_[i] = true;
      new_captures_.push_back(i);
      std::ostringstream ss;
      ss << "port " << i << " held " << res.held << " s";
      log_.events.push_back(SimEvent{time(), "capture", ss.str()});
    }
  }
}

SimLog run_scenario(const Scenario& scenario, Controller& controller) {
  SimEngine engine(scenario);
  const size_t steps =
      static_cast<size_t>(std::llround(scenario.duration / scenario.dt));
  Vec4 held = Vec4::Zero();
  for (size_t k = 0; k < steps; ++k) {
    if (k % static_cast<size_t>(scenario.control_divisor) == 0) {
      try {
        Controller::Output out =
            controller.command(engine.state(), engine.time());
        held = out.u;
        for (SimEvent e : out.events) {
          e.t = engine.time();
          engine.add_event(e.kind, e.detail);
        }
      } catch (const std::exception& e) {
        engine.add_event("controller_error", e.what());
      }
    }
    engine.step(held);
    if (scenario.stop_on_capture && engine.any_captured()) break;
  }
  return engine.take_log();
}

}  // namespace usv
