#include "ndtsim/mission.hpp"

#include <cmath>

#include "ndtsim/errors.hpp"
#include "ndtsim/math.hpp"

namespace ndtsim {

const char* phase_name(MissionPhase phase) {
  switch (phase) {
    case MissionPhase::Idle: return "Idle";
    case MissionPhase::ApproachInspection: return "ApproachInspection";
    case MissionPhase::PrepareContact: return "PrepareContact";
    case MissionPhase::MoveForward: return "MoveForward";
    case MissionPhase::PerformMeasurement: return "PerformMeasurement";
    case MissionPhase::Detach: return "Detach";
    case MissionPhase::Done: return "Done";
    case MissionPhase::Aborted: return "Aborted";
  }
  return "?";
}

void MissionConfig::validate() const {
  if (!(approach_offset > 0.0)) throw ConfigError("mission.approach_offset must be > 0");
  if (!(f_desired > 0.0)) throw ConfigError("mission.f_desired must be > 0");
  if (!(f_contact_threshold > 0.0)) {
    throw ConfigError("mission.f_contact_threshold must be > 0");
  }
  if (!(approach_speed > 0.0)) throw ConfigError("mission.approach_speed must be > 0");
  if (!(t_bias_window > 0.0)) throw ConfigError("mission.t_bias_window must be > 0");
}

bool contact_detected(const Vec3& f_ext_hat, double threshold) {
  return f_ext_hat.norm() > threshold;
}

namespace {

// Horizontal direction perpendicular to the surface normal.
Vec3 lateral_direction(const Vec3& normal) {
  Vec3 lat = normal.cross(Vec3::UnitZ());
  if (lat.norm() < 1e-6) lat = normal.cross(Vec3::UnitX());
  return lat.normalized();
}

}  // namespace

std::vector<Waypoint> detach_waypoints(const Vec3& current_p, double current_yaw,
                                       const Vec3& surface_normal,
                                       const MissionConfig& cfg) {
  Waypoint target;
  target.p = current_p + surface_normal * cfg.detach_back_offset +
             lateral_direction(surface_normal) * cfg.detach_lateral_offset;
  target.yaw = current_yaw + cfg.detach_yaw;
  return {target};
}

MissionFsm::MissionFsm(const MissionConfig& cfg,
                       const AdmittanceConfig& admittance, double probe_reach)
    : cfg_(cfg), admittance_(admittance), probe_reach_(probe_reach) {
  cfg.validate();
}

void MissionFsm::request_inspection(const InspectionRequest& request) {
  if (std::abs(request.normal.norm() - 1.0) > 1e-6) {
    throw InvalidPose("inspection normal must be a unit vector");
  }
  if (request.normal.head<2>().norm() < 1e-6) {
    throw InvalidPose("inspection normal is vertical; the probe is body-mounted");
  }
  if (!finite(request.point)) throw InvalidPose("non-finite inspection point");
  state_.request = request;
  state_.has_request = true;
}

double MissionFsm::aligned_yaw() const {
  // Heading that points the probe (body x) against the surface normal.
  const Vec3& n = state_.request.normal;
  return std::atan2(-n.y(), -n.x());
}

Vec3 MissionFsm::approach_waypoint() const {
  return state_.request.point + state_.request.normal * cfg_.approach_offset;
}

void MissionFsm::enter(MissionPhase next, double t) {
  state_.phase = next;
  state_.phase_entry_time = t;
}

void MissionFsm::abort(const std::string& reason, double t) {
  state_.abort_reason = reason;
  state_.contact_latched = false;
  enter(MissionPhase::Aborted, t);
}

MissionDirectives MissionFsm::tick(const MissionInputs& in) {
  MissionDirectives out;
  const double elapsed = in.t - state_.phase_entry_time;

  switch (state_.phase) {
    case MissionPhase::Idle:
      if (state_.has_request) {
        enter(MissionPhase::ApproachInspection, in.t);
        Waypoint wp;
        wp.p = approach_waypoint();
        wp.yaw = aligned_yaw();
        out.waypoints = {wp};
      }
      break;

    case MissionPhase::ApproachInspection:
      if (in.trajectory_done &&
          (in.odom_p - approach_waypoint()).norm() < cfg_.pose_gate) {
        enter(MissionPhase::PrepareContact, in.t);
        out.enable_admittance = true;
        out.estimate_bias = true;
      } else if (elapsed > cfg_.t_approach_max) {
        abort("approach timeout", in.t);
      }
      break;

    case MissionPhase::PrepareContact:
      if (elapsed >= cfg_.t_bias_window && in.bias_ready) {
        enter(MissionPhase::MoveForward, in.t);
        // Press the probe tip to the stiffness-derived depth beyond the
        // surface; the waypoint is the matching vehicle position.
        const double depth =
            depth_for_force(cfg_.f_desired, admittance_, -state_.request.normal);
        Waypoint wp;
        wp.p = state_.request.point +
               state_.request.normal * (probe_reach_ - depth);
        wp.yaw = aligned_yaw();
        out.waypoints = {wp};
        TrajectoryLimits slow;
        slow.max_vel = cfg_.approach_speed;
        out.leg_limits = slow;
      }
      break;

    case MissionPhase::MoveForward:
      if (!state_.contact_latched &&
          contact_detected(in.f_ext_hat, cfg_.f_contact_threshold)) {
        state_.contact_latched = true;
      }
      if (state_.contact_latched && in.trajectory_done) {
        enter(MissionPhase::PerformMeasurement, in.t);
        out.dispense_couplant = true;
        out.request_measurement = true;
      } else if (elapsed > cfg_.t_contact_max) {
        abort("contact timeout", in.t);
      }
      break;

    case MissionPhase::PerformMeasurement:
      out.request_measurement = true;
      if (in.ut.quality == UTQuality::GoodStable) {
        state_.measurement = in.ut;
        enter(MissionPhase::Detach, in.t);
        out.request_measurement = false;
        out.waypoints = detach_waypoints(in.odom_p, in.odom_yaw,
                                         state_.request.normal, cfg_);
      } else if (elapsed > cfg_.t_measurement_max) {
        abort("measurement timeout", in.t);
      }
      break;

    case MissionPhase::Detach: {
      const double dist =
          state_.request.normal.dot(in.odom_p - state_.request.point);
      if (dist > 0.8 * cfg_.approach_offset) {
        state_.contact_latched = false;
        enter(MissionPhase::Done, in.t);
      } else if (elapsed > cfg_.t_detach_max) {
        abort("detach timeout", in.t);
      }
      break;
    }

    case MissionPhase::Done:
    case MissionPhase::Aborted:
      break;  // terminal, no directives
  }
  return out;
}

}  // namespace ndtsim
