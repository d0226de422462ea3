#include "ndtsim/vehicle.hpp"

#include <algorithm>
#include <cmath>

namespace ndtsim {

double VehicleParams::hover_rotor_speed() const {
  double axis_z_sum = 0.0;
  for (const auto& z : rotor_axes) axis_z_sum += z.z();
  return std::sqrt(m * kGravity / (c_f * axis_z_sum));
}

void VehicleParams::validate() const {
  if (!(m > 0.0)) throw ConfigError("vehicle.m must be > 0");
  if (!(c_f > 0.0)) throw ConfigError("vehicle.c_f must be > 0");
  if (!(tau_att > 0.0)) throw ConfigError("vehicle.tau_att must be > 0");
  if (!(tau_thrust > 0.0)) throw ConfigError("vehicle.tau_thrust must be > 0");
  if (!(omega_max > 0.0)) throw ConfigError("vehicle.omega_max must be > 0");
  for (const auto& z : rotor_axes) {
    if (std::abs(z.norm() - 1.0) > 1e-6) {
      throw ConfigError("vehicle rotor axes must be unit vectors");
    }
  }
}

AccelYawRateCmd AccelYawRateCmd::saturated(const Vec3& accel, double yaw_rate,
                                           const VehicleParams& params) {
  if (!finite(accel) || !std::isfinite(yaw_rate)) {
    throw NonFiniteInput("non-finite acceleration/yaw-rate command");
  }
  AccelYawRateCmd cmd;
  const double n = accel.norm();
  cmd.accel = (n > params.accel_cmd_max) ? Vec3(accel * (params.accel_cmd_max / n))
                                         : accel;
  cmd.yaw_rate = yaw_rate;
  return cmd;
}

double yaw_from_quat(const Quat& q) {
  const Mat3 R = q.toRotationMatrix();
  return std::atan2(R(1, 0), R(0, 0));
}

VehicleState VehicleState::hover(const Vec3& position, double yaw,
                                 const VehicleParams& params) {
  VehicleState s;
  s.p = position;
  s.v = Vec3::Zero();
  s.q = Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
  s.psi = wrap_angle(yaw);
  s.yaw_target = s.psi;
  s.rotor_speeds.setConstant(params.hover_rotor_speed());
  s.t = 0.0;
  return s;
}

Vec3 rotor_force_body(const Vec4& rotor_speeds, const VehicleParams& params) {
  return params.c_f * rotor_thrust_basis(rotor_speeds, params);
}

Vec3 rotor_thrust_basis(const Vec4& rotor_speeds, const VehicleParams& params) {
  Vec3 f = Vec3::Zero();
  for (int i = 0; i < 4; ++i) {
    const double w = rotor_speeds[i];
    f += std::abs(w) * w * params.rotor_axes[static_cast<size_t>(i)];
  }
  return f;
}

Vec3 vehicle_accel(const VehicleState& state, const Vec3& f_ext_world,
                   const VehicleParams& params) {
  const Vec3 f_rot_world = state.R() * rotor_force_body(state.rotor_speeds, params);
  return Vec3(0.0, 0.0, -kGravity) + (f_rot_world + f_ext_world) / params.m;
}

VehicleState step_dynamics(const VehicleState& state, const Vec3& f_ext_world,
                           const VehicleParams& params, double dt) {
  if (!finite(f_ext_world)) throw NonFiniteInput("non-finite external force");
  VehicleState s = state;
  const Vec3 a = vehicle_accel(state, f_ext_world, params);
  s.v += a * dt;
  s.p += s.v * dt;
  s.t += dt;
  if (!finite(s.p) || !finite(s.v)) {
    throw NonFiniteState("vehicle state diverged at t=" + std::to_string(s.t));
  }
  return s;
}

VehicleState inner_loop(const AccelYawRateCmd& cmd, const VehicleState& state,
                        const VehicleParams& params, double dt) {
  VehicleState s = state;
  const Vec3 f_des = params.m * cmd.accel;
  const double f_des_norm = f_des.norm();

  Vec3 zb_des;
  if (f_des_norm < params.f_min) {
    zb_des = state.R().col(2);  // hold tilt through near-zero thrust
  } else {
    zb_des = f_des / f_des_norm;
  }

  s.yaw_target = wrap_angle(state.yaw_target + cmd.yaw_rate * dt);
  const double psi_des = s.yaw_target;
  const Vec3 xc(std::cos(psi_des), std::sin(psi_des), 0.0);
  Vec3 yb = zb_des.cross(xc);
  if (yb.norm() < 1e-9) {
    yb = state.R().col(1);  // 90 deg tilt toward heading, keep current lateral
  }
  yb.normalize();
  const Vec3 xb = yb.cross(zb_des);
  Mat3 R_des;
  R_des.col(0) = xb;
  R_des.col(1) = yb;
  R_des.col(2) = zb_des;

  const double alpha = 1.0 - std::exp(-dt / params.tau_att);
  s.q = state.q.slerp(alpha, Quat(R_des)).normalized();
  s.psi = yaw_from_quat(s.q);

  const double f_now = rotor_force_body(state.rotor_speeds, params).norm();
  const double beta = 1.0 - std::exp(-dt / params.tau_thrust);
  double f_tot = f_now + beta * (f_des_norm - f_now);
  const double f_max = 4.0 * params.c_f * params.omega_max * params.omega_max;
  f_tot = std::clamp(f_tot, 0.0, f_max);
  const double w = std::sqrt(f_tot / (4.0 * params.c_f));
  s.rotor_speeds.setConstant(std::min(w, params.omega_max));
  return s;
}

SensorReadings sense(const VehicleState& state, const Vec3& f_ext_world,
                     const NoiseConfig& noise, const VehicleParams& params,
                     Rng& rng) {
  SensorReadings r;
  const Vec3 a = vehicle_accel(state, f_ext_world, params);
  const Mat3 R = state.R();

  r.odom_p = state.p + gaussian_vec3(rng, noise.odom_pos_sigma);
  r.odom_v = state.v + gaussian_vec3(rng, noise.odom_vel_sigma);
  const double yaw_n = gaussian(rng, noise.odom_yaw_sigma);
  r.odom_q = Quat(Eigen::AngleAxisd(yaw_n, Vec3::UnitZ())) * state.q;
  r.imu_accel_body = R.transpose() * (a + Vec3(0.0, 0.0, kGravity)) +
                     gaussian_vec3(rng, noise.imu_accel_sigma);
  for (int i = 0; i < 4; ++i) {
    r.rotor_speeds_meas[i] =
        state.rotor_speeds[i] * (1.0 + gaussian(rng, noise.rotor_speed_rel_sigma));
  }
  return r;
}

}  // namespace ndtsim
