#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "usv/nmpc.hpp"
#include "usv/pid.hpp"
#include "usv/simulator.hpp"
#include "usv/types.hpp"

namespace usv {

/// Bridge-construction phases. One round picks a block up at the station
/// and docks it onto the bridge end; the hull expands only for docking
/// work and travels contracted.
enum class MissionPhase {
  Init,
  MoveToPickupPrep,
  ExpandAndMagnetOn,
  DockPickup,
  ReturnToPrep,
  SpinToFaceBridge,
  Deliver,
  ExpandForAssembly,
  DockAssembly,
  MagnetOff,
  Retreat,
  Done,
  Aborted,
};

const char* mission_phase_name(MissionPhase phase);

/// Every legal phase transition; the state machine takes no edge outside
/// this list.
const std::vector<std::pair<MissionPhase, MissionPhase>>& mission_edges();

struct MissionPlan {
  Pose pickup;                // pickup station pose
  double prep_offset = 0.4;   // m, preparation point distance from ports
  std::vector<Pose> targets;  // assembly slots in placement order
  double block_width = 0.4;   // m
  double payload_mass = 3.0;  // kg while carrying a block
  double payload_yaw_inertia = 0.3;  // kg m^2

  /// Exactly one pickup station; slot spacing at least one block width.
  void validate() const;

  /// Preparation pose at distance prep_offset in front of a port.
  Pose prep_pose(const Pose& port) const;
};

/// Slots placed end-to-end along the bridge axis, spaced by the block
/// width, all facing the bridge heading.
MissionPlan plan_bridge(const Eigen::Vector2d& bridge_start,
                        double bridge_heading, int blocks, double block_width,
                        const Pose& pickup, double prep_offset = 0.4);

struct MissionConfig {
  MissionPlan plan;
  int retry_cap = 5;
  double spin_tolerance = deg2rad(10.0);
  double goal_position_tol = 0.05;  // m
  double goal_yaw_tol = deg2rad(5.0);
  double settle_speed = 0.15;       // m/s, transit-leg arrival speed
  double dock_expansion = 0.5;      // m, form used for docking work
  double approach_speed = 0.06;     // m/s, final docking leg
  double transit_speed = 0.25;      // m/s, contracted travel
  double transit_timeout = 180.0;   // s per transit leg
  double dock_timeout = 60.0;       // s per docking attempt
  std::string controller = "nmpc";  // or "pid"
  NmpcConfig nmpc;
};

struct MissionState {
  MissionPhase phase = MissionPhase::Init;
  int blocks_placed = 0;
  bool carrying = false;
  int pickup_retries = 0;
  int assembly_retries = 0;
};

struct PhaseRecord {
  MissionPhase phase = MissionPhase::Init;
  double t_enter = 0.0;
  double t_exit = 0.0;
};

struct MissionSummary {
  bool success = false;
  int blocks_placed = 0;
  int pickup_retries = 0;
  int assembly_retries = 0;
  std::string abort_phase;  // empty on success
  double total_time = 0.0;
  std::vector<PhaseRecord> timeline;
};

/// Runs the plan against the simulator. The base scenario supplies the
/// vessel, water, step sizes, and duration budget; ports and payload are
/// derived from the plan.
class MissionEngine {
 public:
  MissionEngine(MissionConfig cfg, Scenario base);

  /// Advances one simulator step (controller cycles fire on their
  /// divisor); returns the phase after the step.
  MissionPhase step();

  /// Steps until Done or Aborted.
  void run();

  const MissionState& state() const { return state_; }
  double time() const { return engine_.time(); }
  MissionSummary summary() const;
  const SimLog& log() const { return engine_.log(); }
  SimLog take_log() { return engine_.take_log(); }

 private:
  void enter(MissionPhase next, const std::string& why);
  void start_leg(const Pose& goal, double speed, double hold);
  void hold_position_leg();
  bool at_goal(const Pose& goal, double pos_tol, double yaw_tol) const;
  Pose current_assembly_port() const;
  size_t assembly_port_index() const;
  void begin_contract_tail(bool success);

  MissionConfig cfg_;
  SimEngine engine_;
  MissionState state_;
  std::vector<PhaseRecord> timeline_;
  double phase_entry_time_ = 0.0;
  double leg_start_time_ = 0.0;
  double leg_deadline_ = 0.0;
  Pose leg_goal_;
  std::unique_ptr<Controller> controller_;
  Vec4 held_u_ = Vec4::Zero();
  enum class DockStage { approach, contract_success, contract_retry };
  DockStage dock_stage_ = DockStage::approach;
  bool aborted_on_budget_ = false;
};

struct MissionResult {
  MissionSummary summary;
  SimLog log;
};

MissionResult run_mission(const MissionConfig& cfg, const Scenario& base);

void write_mission_summary(const MissionSummary& summary,
                           const std::string& path);

}  // namespace usv
