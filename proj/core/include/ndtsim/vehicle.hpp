#pragma once

#include <array>

#include "ndtsim/errors.hpp"
#include "ndtsim/math.hpp"
#include "ndtsim/types.hpp"

namespace ndtsim {

/// Physical and inner-loop parameters of the simulated quadrotor.
struct VehicleParams {
  double m = 2.3;       // kg
  double c_f = 1.0e-5;  // N/(rad/s)^2, quadratic thrust coefficient
  std::array<Vec3, 4> rotor_axes{Vec3::UnitZ(), Vec3::UnitZ(), Vec3::UnitZ(),
                                 Vec3::UnitZ()};  // body frame
  double tau_att = 0.05;    // s, attitude tracking lag of the internal loop
  double tau_thrust = 0.05; // s, total-thrust tracking lag
  double omega_max = 1500.0;           // rad/s
  double accel_cmd_max = 3.0 * kGravity;  // m/s^2, command saturation
  double f_min = 0.1;  // N, below this thrust the tilt direction is held

  /// Uniform rotor speed that balances gravity.
  double hover_rotor_speed() const;
  void validate() const;
};

/// Sensor noise levels. All Gaussian, zero mean.
struct NoiseConfig {
  double odom_pos_sigma = 0.005;        // m
  double odom_vel_sigma = 0.005;        // m/s
  double odom_yaw_sigma = 0.0;          // rad
  double imu_accel_sigma = 0.05;        // m/s^2
  double rotor_speed_rel_sigma = 0.01;  // relative

  static NoiseConfig zero() {
    return NoiseConfig{0.0, 0.0, 0.0, 0.0, 0.0};
  }
};

/// World-frame acceleration command (gravity compensation included) plus a
/// yaw-rate command, as accepted by the internal flight controller.
struct AccelYawRateCmd {
  Vec3 accel = Vec3(0.0, 0.0, kGravity);
  double yaw_rate = 0.0;

  /// Builds a command, clamping |accel| to params.accel_cmd_max. Flight
  /// controllers clamp rather than reject, so saturation is silent.
  static AccelYawRateCmd saturated(const Vec3& accel, double yaw_rate,
                                   const VehicleParams& params);
};

/// Simulated ground-truth state.
struct VehicleState {
  Vec3 p = Vec3::Zero();  // m, world
  Vec3 v = Vec3::Zero();  // m/s, world
  Quat q = Quat::Identity();  // world <- body
  double psi = 0.0;           // rad, yaw extracted from q
  Vec4 rotor_speeds = Vec4::Zero();  // rad/s
  double t = 0.0;                    // s
  // heading target of the internal loop; integrates yaw-rate commands and
  // the attitude converges toward it with the tau_att lag
  double yaw_target = 0.0;

  Mat3 R() const { return q.toRotationMatrix(); }

  /// State at the exact hover fixed point for the given pose.
  static VehicleState hover(const Vec3& position, double yaw,
                            const VehicleParams& params);
};

struct SensorReadings {
  Vec3 odom_p = Vec3::Zero();
  Vec3 odom_v = Vec3::Zero();
  Quat odom_q = Quat::Identity();
  Vec3 imu_accel_body = Vec3::Zero();  // specific force
  Vec4 rotor_speeds_meas = Vec4::Zero();
};

double yaw_from_quat(const Quat& q);

/// Total rotor force in the body frame: sum of c_f |w_i| w_i z_i.
Vec3 rotor_force_body(const Vec4& rotor_speeds, const VehicleParams& params);

/// Same sum without the thrust coefficient; used by the identification fit.
Vec3 rotor_thrust_basis(const Vec4& rotor_speeds, const VehicleParams& params);

/// Translational acceleration from the force balance (gravity, rotors,
/// external force).
Vec3 vehicle_accel(const VehicleState& state, const Vec3& f_ext_world,
                   const VehicleParams& params);

/// Semi-implicit Euler step (velocity first, then position) of the
/// translational dynamics. Attitude and rotor speeds are advanced separately
/// by inner_loop. Throws NonFiniteState if the state diverges.
VehicleState step_dynamics(const VehicleState& state, const Vec3& f_ext_world,
                           const VehicleParams& params, double dt);

/// Emulation of the closed internal flight controller: the commanded thrust
/// vector defines a desired tilt and the yaw-rate command advances the
/// desired heading; actual attitude and total thrust converge to those
/// targets with first-order lags tau_att / tau_thrust. Thrust is allocated
/// equally across the four rotors.
VehicleState inner_loop(const AccelYawRateCmd& cmd, const VehicleState& state,
                        const VehicleParams& params, double dt);

/// Noisy sensor readout for the given state and applied external force.
SensorReadings sense(const VehicleState& state, const Vec3& f_ext_world,
                     const NoiseConfig& noise, const VehicleParams& params,
                     Rng& rng);

}  // namespace ndtsim
