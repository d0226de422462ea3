#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ndtsim/admittance.hpp"
#include "ndtsim/contact.hpp"
#include "ndtsim/trajectory.hpp"
#include "ndtsim/types.hpp"

namespace ndtsim {

/// Numbering mirrors the state annotations printed in run timelines.
enum class MissionPhase {
  Idle = 1,
  ApproachInspection = 2,
  PrepareContact = 3,
  MoveForward = 4,
  PerformMeasurement = 5,
  Detach = 6,
  Done = 7,
  Aborted = 8,
};

const char* phase_name(MissionPhase phase);

struct MissionConfig {
  double approach_offset = 0.5;      // m, vehicle standoff from the surface
  double f_desired = 2.0;            // N, target contact force
  double f_contact_threshold = 1.0;  // N, |f_hat| latch level
  double approach_speed = 0.1;       // m/s, Move Forward velocity limit
  double t_bias_window = 2.0;        // s
  double t_measurement_max = 15.0;   // s
  double detach_yaw = 1.0472;        // rad
  double detach_back_offset = 0.5;   // m
  double detach_lateral_offset = 0.3;  // m
  double pose_gate = 0.05;           // m, approach completion gate
  double t_approach_max = 60.0;      // s, timeouts -> Aborted
  double t_contact_max = 30.0;
  double t_detach_max = 10.0;

  void validate() const;
};

struct InspectionRequest {
  Vec3 point = Vec3::Zero();   // m, on the surface
  Vec3 normal = Vec3::UnitX(); // unit, toward free space
};

struct MissionState {
  MissionPhase phase = MissionPhase::Idle;
  double phase_entry_time = 0.0;
  bool contact_latched = false;
  std::optional<UTReading> measurement;
  InspectionRequest request;
  bool has_request = false;
  std::string abort_reason;
};

struct MissionInputs {
  Vec3 f_ext_hat = Vec3::Zero();  // bias-corrected estimate
  Vec3 odom_p = Vec3::Zero();
  double odom_yaw = 0.0;
  UTReading ut;
  bool trajectory_done = true;
  bool bias_ready = true;
  double t = 0.0;
};

/// What the executive should do this tick. Waypoints are leg targets; the
/// executive plans from its current desired state.
struct MissionDirectives {
  std::optional<std::vector<Waypoint>> waypoints;
  std::optional<TrajectoryLimits> leg_limits;
  bool enable_admittance = false;  // reset + enable
  bool estimate_bias = false;      // start a bias-estimation window
  bool dispense_couplant = false;
  bool request_measurement = false;
};

bool contact_detected(const Vec3& f_ext_hat, double threshold);

/// Single detach target: back off along the surface normal, shift laterally,
/// and add the release yaw, so the hood tension capacity drops to zero while
/// the vehicle pulls away.
std::vector<Waypoint> detach_waypoints(const Vec3& current_p,
                                       double current_yaw,
                                       const Vec3& surface_normal,
                                       const MissionConfig& cfg);

/// Six-state inspection sequencer. Ticked at the planner rate; transitions
/// follow Idle -> Approach -> PrepareContact -> MoveForward ->
/// PerformMeasurement -> Detach -> Done, with Aborted reachable from every
/// active phase through timeouts.
class MissionFsm {
 public:
  MissionFsm(const MissionConfig& cfg, const AdmittanceConfig& admittance,
             double probe_reach);

  /// Arms the mission. Throws InvalidPose for a non-unit or near-vertical
  /// normal (the probe is body-mounted and horizontal).
  void request_inspection(const InspectionRequest& request);

  MissionDirectives tick(const MissionInputs& in);

  const MissionState& state() const { return state_; }
  MissionPhase phase() const { return state_.phase; }
  bool terminal() const {
    return state_.phase == MissionPhase::Done ||
           state_.phase == MissionPhase::Aborted;
  }

 private:
  void enter(MissionPhase next, double t);
  void abort(const std::string& reason, double t);
  Vec3 approach_waypoint() const;
  double aligned_yaw() const;

  MissionConfig cfg_;
  AdmittanceConfig admittance_;
  double probe_reach_;
  MissionState state_;
};

}  // namespace ndtsim
