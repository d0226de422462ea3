#pragma once

#include "ndtsim/trajectory.hpp"
#include "ndtsim/types.hpp"

namespace ndtsim {

struct ControllerGains {
  Vec3 Kp = Vec3(14.0, 14.0, 20.0);  // 1/s^2
  Vec3 Kv = Vec3(4.0, 4.0, 8.0);     // 1/s
  double K_psi = 3.0;                // 1/s

  void validate() const;
};

/// PD acceleration command with gravity compensation and estimated-force
/// feedforward:
///   a_cmd = a_r + Kp (p_r - p) + Kv (v_r - v) + g e3 - f_hat / m
/// Saturation happens downstream when the command is handed to the vehicle.
Vec3 accel_command(const ReferenceSetpoint& ref, const Vec3& p, const Vec3& v,
                   const Vec3& f_ext_hat, const ControllerGains& gains,
                   double mass);

/// Yaw-rate command with shortest-angle error wrapping.
double yaw_rate_command(double yaw_ref, double yaw_rate_ref, double yaw,
                        const ControllerGains& gains);

}  // namespace ndtsim
