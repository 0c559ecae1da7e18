#include "usv/mission.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "usv/angles.hpp"
#include "usv/reference.hpp"

namespace usv {

const char* mission_phase_name(MissionPhase phase) {
  switch (phase) {
    case MissionPhase::Init: return "Init";
    case MissionPhase::MoveToPickupPrep: return "MoveToPickupPrep";
    case MissionPhase::ExpandAndMagnetOn: return "ExpandAndMagnetOn";
    case MissionPhase::DockPickup: return "DockPickup";
    case MissionPhase::ReturnToPrep: return "ReturnToPrep";
    case MissionPhase::SpinToFaceBridge: return "SpinToFaceBridge";
    case MissionPhase::Deliver: return "Deliver";
    case MissionPhase::ExpandForAssembly: return "ExpandForAssembly";
    case MissionPhase::DockAssembly: return "DockAssembly";
    case MissionPhase::MagnetOff: return "MagnetOff";
    case MissionPhase::Retreat: return "Retreat";
    case MissionPhase::Done: return "Done";
    case MissionPhase::Aborted: return "Aborted";
  }
  return "Unknown";
}

const std::vector<std::pair<MissionPhase, MissionPhase>>& mission_edges() {
  using P = MissionPhase;
  static const std::vector<std::pair<P, P>> edges = {
      {P::Init, P::MoveToPickupPrep},
      {P::Init, P::Done},  // empty plan
      {P::MoveToPickupPrep, P::ExpandAndMagnetOn},
      {P::ExpandAndMagnetOn, P::DockPickup},
      {P::DockPickup, P::ReturnToPrep},       // capture
      {P::DockPickup, P::MoveToPickupPrep},   // failed attempt, retry
      {P::ReturnToPrep, P::SpinToFaceBridge},
      {P::SpinToFaceBridge, P::Deliver},
      {P::Deliver, P::ExpandForAssembly},     // not the last block
      {P::Deliver, P::DockAssembly},          // last block stays contracted
      {P::ExpandForAssembly, P::DockAssembly},
      {P::DockAssembly, P::MagnetOff},        // capture, block placed
      {P::DockAssembly, P::Deliver},          // failed attempt, retry
      {P::MagnetOff, P::Retreat},
      {P::Retreat, P::MoveToPickupPrep},      // more blocks to place
      {P::Retreat, P::Done},
      // Abort edges: retry caps and leg timeouts.
      {P::MoveToPickupPrep, P::Aborted},
      {P::ExpandAndMagnetOn, P::Aborted},
      {P::DockPickup, P::Aborted},
      {P::ReturnToPrep, P::Aborted},
      {P::SpinToFaceBridge, P::Aborted},
      {P::Deliver, P::Aborted},
      {P::ExpandForAssembly, P::Aborted},
      {P::DockAssembly, P::Aborted},
      {P::Retreat, P::Aborted},
  };
  return edges;
}

void MissionPlan::validate() const {
  if (!(prep_offset > 0.0)) {
    throw std::invalid_argument("mission plan: prep_offset must be positive");
  }
  if (!(block_width > 0.0)) {
    throw std::invalid_argument("mission plan: block_width must be positive");
  }
  if (payload_mass < 0.0 || payload_yaw_inertia < 0.0) {
    throw std::invalid_argument("mission plan: payload must be nonnegative");
  }
  const double min_spacing = block_width - 1e-9;
  for (size_t i = 0; i < targets.size(); ++i) {
    for (size_t j = i + 1; j < targets.size(); ++j) {
      const double d =
          (targets[i].position() - targets[j].position()).norm();
      if (d < min_spacing) {
        throw std::invalid_argument(
            "mission plan: slots " + std::to_string(i) + " and " +
            std::to_string(j) + " overlap (spacing " + std::to_string(d) +
            " < block width)");
      }
    }
  }
}

Pose MissionPlan::prep_pose(const Pose& port) const {
  return Pose(port.x - prep_offset * std::cos(port.psi),
              port.y - prep_offset * std::sin(port.psi), port.psi);
}

MissionPlan plan_bridge(const Eigen::Vector2d& bridge_start,
                        double bridge_heading, int blocks, double block_width,
                        const Pose& pickup, double prep_offset) {
  if (blocks < 0) {
    throw std::invalid_argument("plan_bridge: blocks must be nonnegative");
  }
  MissionPlan plan;
  plan.pickup = pickup;
  plan.prep_offset = prep_offset;
  plan.block_width = block_width;
  const double c = std::cos(bridge_heading);
  const double s = std::sin(bridge_heading);
  for (int k = 0; k < blocks; ++k) {
    plan.targets.emplace_back(bridge_start.x() + k * block_width * c,
                              bridge_start.y() + k * block_width * s,
                              bridge_heading);
  }
  plan.validate();
  return plan;
}

namespace {

std::unique_ptr<Controller> make_controller(const MissionConfig& cfg,
                                            const Scenario& base,
                                            ReferenceTrajectory ref) {
  if (cfg.controller == "nmpc") {
    NmpcConfig nc = cfg.nmpc;
    nc.dt = base.control_period();
    return std::make_unique<NmpcController>(nc, base.vessel, std::move(ref));
  }
  if (cfg.controller == "pid") {
    return std::make_unique<PidController>(base.vessel, std::move(ref),
                                           base.control_period());
  }
  throw std::invalid_argument("mission: unknown controller " + cfg.controller);
}

Scenario mission_scenario(const MissionConfig& cfg, Scenario base) {
  cfg.plan.validate();
  base.ports.clear();
  DockPort pickup;
  pickup.x = cfg.plan.pickup.x;
  pickup.y = cfg.plan.pickup.y;
  pickup.facing = cfg.plan.pickup.psi;
  base.ports.push_back(pickup);
  for (const Pose& t : cfg.plan.targets) {
    DockPort port;
    port.x = t.x;
    port.y = t.y;
    port.facing = t.psi;
    base.ports.push_back(port);
  }
  base.payload_mass = cfg.plan.payload_mass;
  base.payload_yaw_inertia = cfg.plan.payload_yaw_inertia;
  base.stop_on_capture = false;
  return base;
}

}  // namespace

MissionEngine::MissionEngine(MissionConfig cfg, Scenario base)
    : cfg_(std::move(cfg)),
      engine_(mission_scenario(cfg_, std::move(base))) {
  timeline_.push_back(PhaseRecord{MissionPhase::Init, 0.0, 0.0});
}

size_t MissionEngine::assembly_port_index() const {
  return 1 + static_cast<size_t>(state_.blocks_placed);
}

Pose MissionEngine::current_assembly_port() const {
  return cfg_.plan.targets.at(static_cast<size_t>(state_.blocks_placed));
}

bool MissionEngine::at_goal(const Pose& goal, double pos_tol,
                            double yaw_tol) const {
  const VesselState& s = engine_.state();
  const double pos_err =
      std::hypot(s.pose.x - goal.x, s.pose.y - goal.y);
  const double yaw_err = std::abs(angle_diff(s.pose.psi, goal.psi));
  const double speed = std::hypot(s.vel.u, s.vel.v);
  return pos_err < pos_tol && yaw_err < yaw_tol && speed < cfg_.settle_speed;
}

void MissionEngine::start_leg(const Pose& goal, double speed, double hold) {
  leg_goal_ = goal;
  leg_start_time_ = engine_.time();
  const ReferenceTrajectory ref = build_dock_approach(
      engine_.state().pose, goal, speed, engine_.scenario().control_period(),
      hold);
  controller_ = make_controller(cfg_, engine_.scenario(), ref);
  held_u_.setZero();
}

void MissionEngine::hold_position_leg() {
  start_leg(engine_.state().pose, cfg_.transit_speed, 60.0);
}

void MissionEngine::enter(MissionPhase next, const std::string& why) {
  const double now = engine_.time();
  if (!timeline_.empty()) timeline_.back().t_exit = now;
  std::ostringstream ss;
  ss << mission_phase_name(state_.phase) << " -> " << mission_phase_name(next)
     << " (" << why << ")";
  engine_.add_event("phase", ss.str());

  state_.phase = next;
  phase_entry_time_ = now;
  timeline_.push_back(PhaseRecord{next, now, now});
  dock_stage_ = DockStage::approach;

  const MissionPlan& plan = cfg_.plan;
  switch (next) {
    case MissionPhase::Init:
      break;
    case MissionPhase::MoveToPickupPrep:
      leg_deadline_ = now + cfg_.transit_timeout;
      start_leg(plan.prep_pose(plan.pickup), cfg_.transit_speed, 30.0);
      break;
    case MissionPhase::ExpandAndMagnetOn:
      leg_deadline_ = now + cfg_.transit_timeout;
      engine_.set_expansion_target(cfg_.dock_expansion);
      engine_.add_event("magnet", "on");
      hold_position_leg();
      break;
    case MissionPhase::DockPickup:
      leg_deadline_ = now + cfg_.dock_timeout;
      engine_.reset_capture(0);
      start_leg(plan.pickup, cfg_.approach_speed, cfg_.dock_timeout);
      break;
    case MissionPhase::ReturnToPrep:
      leg_deadline_ = now + cfg_.transit_timeout;
      start_leg(plan.prep_pose(plan.pickup), cfg_.transit_speed, 30.0);
      break;
    case MissionPhase::SpinToFaceBridge: {
      leg_deadline_ = now + cfg_.transit_timeout;
      const Pose target =
          plan.prep_pose(current_assembly_port());
      const VesselState& s = engine_.state();
      const double bearing =
          std::atan2(target.y - s.pose.y, target.x - s.pose.x);
      start_leg(Pose(s.pose.x, s.pose.y, bearing), cfg_.transit_speed, 60.0);
      break;
    }
    case MissionPhase::Deliver:
      leg_deadline_ = now + cfg_.transit_timeout;
      start_leg(plan.prep_pose(current_assembly_port()), cfg_.transit_speed,
                30.0);
      break;
    case MissionPhase::ExpandForAssembly:
      leg_deadline_ = now + cfg_.transit_timeout;
      engine_.set_expansion_target(cfg_.dock_expansion);
      hold_position_leg();
      break;
    case MissionPhase::DockAssembly:
      leg_deadline_ = now + cfg_.dock_timeout;
      engine_.reset_capture(assembly_port_index());
      start_leg(current_assembly_port(), cfg_.approach_speed,
                cfg_.dock_timeout);
      break;
    case MissionPhase::MagnetOff:
      engine_.add_event("magnet", "off");
      engine_.set_carrying(false);
      state_.carrying = false;
      state_.blocks_placed += 1;
      engine_.add_event("block_placed",
                        std::to_string(state_.blocks_placed));
      break;
    case MissionPhase::Retreat:
      leg_deadline_ = now + cfg_.transit_timeout;
      // Back out to the preparation point of the slot just filled.
      start_leg(plan.prep_pose(
                    plan.targets.at(static_cast<size_t>(
                        state_.blocks_placed - 1))),
                cfg_.transit_speed, 30.0);
      break;
    case MissionPhase::Done:
    case MissionPhase::Aborted:
      controller_.reset();
      break;
  }
}

void MissionEngine::begin_contract_tail(bool success) {
  dock_stage_ =
      success ? DockStage::contract_success : DockStage::contract_retry;
  engine_.set_expansion_target(0.0);
  hold_position_leg();
}

MissionPhase MissionEngine::step() {
  if (state_.phase == MissionPhase::Done ||
      state_.phase == MissionPhase::Aborted) {
    return state_.phase;
  }

  const double now = engine_.time();
  if (now >= engine_.scenario().duration) {
    aborted_on_budget_ = true;
    enter(MissionPhase::Aborted, "time budget exhausted");
    return state_.phase;
  }

  // Init transitions before any motion.
  if (state_.phase == MissionPhase::Init) {
    if (cfg_.plan.targets.empty()) {
      enter(MissionPhase::Done, "empty plan");
    } else {
      enter(MissionPhase::MoveToPickupPrep, "plan loaded");
    }
    return state_.phase;
  }

  if (controller_ != nullptr &&
      engine_.step_count() %
              static_cast<size_t>(engine_.scenario().control_divisor) ==
          0) {
    const double leg_t = now - leg_start_time_;
    try {
      Controller::Output out = controller_->command(engine_.state(), leg_t);
      held_u_ = out.u;
      for (const SimEvent& e : out.events) {
        engine_.add_event(e.kind, e.detail);
      }
    } catch (const std::exception& e) {
      engine_.add_event("controller_error", e.what());
    }
  }
  engine_.step(held_u_);

  const MissionPlan& plan = cfg_.plan;
  const double expansion = engine_.state().expansion;
  const bool contracted = expansion <= 1e-9;
  const double t = engine_.time();

  switch (state_.phase) {
    case MissionPhase::Init:
    case MissionPhase::Done:
    case MissionPhase::Aborted:
      break;

    case MissionPhase::MoveToPickupPrep:
      if (at_goal(leg_goal_, cfg_.goal_position_tol, cfg_.goal_yaw_tol)) {
        enter(MissionPhase::ExpandAndMagnetOn, "at pickup preparation point");
      } else if (t > leg_deadline_) {
        enter(MissionPhase::Aborted, "transit timeout");
      }
      break;

    case MissionPhase::ExpandAndMagnetOn:
      if (std::abs(expansion - cfg_.dock_expansion) <= 1e-9) {
        enter(MissionPhase::DockPickup, "expanded, magnet on");
      } else if (t > leg_deadline_) {
        enter(MissionPhase::Aborted, "expansion timeout");
      }
      break;

    case MissionPhase::DockPickup:
      if (dock_stage_ == DockStage::approach) {
        if (engine_.port_captured(0)) {
          engine_.set_carrying(true);
          state_.carrying = true;
          begin_contract_tail(true);
        } else if (t > leg_deadline_) {
          begin_contract_tail(false);
        }
      } else if (contracted) {
        if (dock_stage_ == DockStage::contract_success) {
          enter(MissionPhase::ReturnToPrep, "block captured");
        } else {
          state_.pickup_retries += 1;
          if (state_.pickup_retries > cfg_.retry_cap) {
            enter(MissionPhase::Aborted, "pickup retry cap exceeded");
          } else {
            enter(MissionPhase::MoveToPickupPrep,
                  "capture failed, retry " +
                      std::to_string(state_.pickup_retries));
          }
        }
      }
      break;

    case MissionPhase::ReturnToPrep:
      if (at_goal(leg_goal_, cfg_.goal_position_tol, cfg_.goal_yaw_tol)) {
        enter(MissionPhase::SpinToFaceBridge, "back at preparation point");
      } else if (t > leg_deadline_) {
        enter(MissionPhase::Aborted, "transit timeout");
      }
      break;

    case MissionPhase::SpinToFaceBridge: {
      const double yaw_err =
          std::abs(angle_diff(engine_.state().pose.psi, leg_goal_.psi));
      if (yaw_err < cfg_.spin_tolerance &&
          std::abs(engine_.state().vel.r) < 0.2) {
        enter(MissionPhase::Deliver, "facing the bridge");
      } else if (t > leg_deadline_) {
        enter(MissionPhase::Aborted, "spin timeout");
      }
      break;
    }

    case MissionPhase::Deliver:
      if (at_goal(leg_goal_, cfg_.goal_position_tol, cfg_.goal_yaw_tol)) {
        const bool last_block =
            state_.blocks_placed + 1 ==
            static_cast<int>(plan.targets.size());
        if (last_block) {
          enter(MissionPhase::DockAssembly,
                "last block, assembling contracted");
        } else {
          enter(MissionPhase::ExpandForAssembly, "at assembly preparation");
        }
      } else if (t > leg_deadline_) {
        enter(MissionPhase::Aborted, "transit timeout");
      }
      break;

    case MissionPhase::ExpandForAssembly:
      if (std::abs(expansion - cfg_.dock_expansion) <= 1e-9) {
        enter(MissionPhase::DockAssembly, "expanded for assembly");
      } else if (t > leg_deadline_) {
        enter(MissionPhase::Aborted, "expansion timeout");
      }
      break;

    case MissionPhase::DockAssembly:
      if (dock_stage_ == DockStage::approach) {
        if (engine_.port_captured(assembly_port_index())) {
          begin_contract_tail(true);
        } else if (t > leg_deadline_) {
          begin_contract_tail(false);
        }
      } else if (contracted) {
        if (dock_stage_ == DockStage::contract_success) {
          enter(MissionPhase::MagnetOff, "block docked to bridge");
        } else {
          state_.assembly_retries += 1;
          if (state_.assembly_retries > cfg_.retry_cap) {
            enter(MissionPhase::Aborted, "assembly retry cap exceeded");
          } else {
            enter(MissionPhase::Deliver,
                  "assembly failed, retry " +
                      std::to_string(state_.assembly_retries));
          }
        }
      }
      break;

    case MissionPhase::MagnetOff:
      enter(MissionPhase::Retreat, "payload released");
      break;

    case MissionPhase::Retreat:
      if (at_goal(leg_goal_, cfg_.goal_position_tol, cfg_.goal_yaw_tol)) {
        if (state_.blocks_placed ==
            static_cast<int>(plan.targets.size())) {
          enter(MissionPhase::Done, "bridge complete");
        } else {
          enter(MissionPhase::MoveToPickupPrep, "next block");
        }
      } else if (t > leg_deadline_) {
        enter(MissionPhase::Aborted, "transit timeout");
      }
      break;
  }
  return state_.phase;
}

void MissionEngine::run() {
  while (state_.phase != MissionPhase::Done &&
         state_.phase != MissionPhase::Aborted) {
    step();
  }
  if (!timeline_.empty()) timeline_.back().t_exit = engine_.time();
}

MissionSummary MissionEngine::summary() const {
  MissionSummary s;
  s.success = state_.phase == MissionPhase::Done;
  s.blocks_placed = state_.blocks_placed;
  s.pickup_retries = state_.pickup_retries;
  s.assembly_retries = state_.assembly_retries;
  s.total_time = engine_.time();
  s.timeline = timeline_;
  if (!s.timeline.empty()) s.timeline.back().t_exit = engine_.time();
  if (!s.success) {
    // Name the phase that was active when the abort fired.
    for (size_t i = timeline_.size(); i-- > 0;) {
      if (timeline_[i].phase != MissionPhase::Aborted) {
        s.abort_phase = mission_phase_name(timeline_[i].phase);
        break;
      }
    }
  }
  return s;
}

MissionResult run_mission(const MissionConfig& cfg, const Scenario& base) {
  MissionEngine engine(cfg, base);
  engine.run();
  MissionResult result;
  result.summary = engine.summary();
  result.log = engine.take_log();
  return result;
}

void write_mission_summary(const MissionSummary& summary,
                           const std::string& path) {
  nlohmann::json j;
  j["success"] = summary.success;
  j["blocks_placed"] = summary.blocks_placed;
  j["pickup_retries"] = summary.pickup_retries;
  j["assembly_retries"] = summary.assembly_retries;
  j["abort_phase"] = summary.abort_phase;
  j["total_time"] = summary.total_time;
  j["timeline"] = nlohmann::json::array();
  for (const PhaseRecord& r : summary.timeline) {
    j["timeline"].push_back({{"phase", mission_phase_name(r.phase)},
                             {"t_enter", r.t_enter},
                             {"t_exit", r.t_exit}});
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << j.dump(2) << "\n";
}

}  // namespace usv
