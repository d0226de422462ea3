#include "ndtsim/observer.hpp"

#include <cmath>

#include "ndtsim/errors.hpp"

namespace ndtsim {

void ObserverConfig::validate(double dt) const {
  for (int i = 0; i < 3; ++i) {
    if (!(L[i] > 0.0)) throw ConfigError("observer.L entries must be > 0");
    if (!(L[i] * dt < 2.0)) {
      throw ConfigError("observer.L * dt must stay below 2 for stability");
    }
  }
  if (!(omega_c > 0.0)) throw ConfigError("observer.omega_c must be > 0");
}

ForceEstimate observer_update(const ForceEstimate& est,
                              const Vec3& imu_accel_body, const Quat& odom_q,
                              const Vec4& rotor_speeds_meas,
                              const VehicleParams& params,
                              const ObserverConfig& cfg, double dt) {
  if (!finite(imu_accel_body) || !finite(rotor_speeds_meas)) {
    throw NonFiniteInput("non-finite observer input");
  }
  const Mat3 R = odom_q.toRotationMatrix();
  const Vec3 f_rot_world = R * rotor_force_body(rotor_speeds_meas, params);
  // m*p_ddot + m*g*e3 reconstructed from specific force: m * R * imu.
  const Vec3 residual = params.m * (R * imu_accel_body) - f_rot_world;

  ForceEstimate out = est;
  for (int i = 0; i < 3; ++i) {
    const double a = std::exp(-cfg.L[i] * dt);
    out.f_hat[i] = a * est.f_hat[i] + (1.0 - a) * residual[i];
  }
  const double b = std::exp(-cfg.omega_c * dt);
  out.f_hat_filtered = b * est.f_hat_filtered + (1.0 - b) * out.f_hat;
  return out;
}

Vec3 estimate_bias(std::span<const Vec3> history) {
  if (history.size() < 10) {
    throw InsufficientSamples("bias window needs at least 10 samples, got " +
                              std::to_string(history.size()));
  }
  Vec3 sum = Vec3::Zero();
  for (const Vec3& f : history) sum += f;
  return sum / static_cast<double>(history.size());
}

IdResult identify_cf(std::span<const IdPoint> data, const VehicleParams& params) {
  if (data.empty()) throw DegenerateData("identification dataset is empty");
  double num = 0.0;
  double den = 0.0;
  for (const IdPoint& p : data) {
    const Vec3 a = p.mean_R * rotor_thrust_basis(p.mean_rotor_speeds, params);
    const Vec3 b(0.0, 0.0, p.mass_kg * kGravity);
    num += a.dot(b);
    den += a.dot(a);
  }
  if (den == 0.0) {
    throw DegenerateData("identification dataset has zero rotor excitation");
  }
  IdResult r;
  r.c_f = num / den;
  double sq = 0.0;
  for (const IdPoint& p : data) {
    const Vec3 a = p.mean_R * rotor_thrust_basis(p.mean_rotor_speeds, params);
    const Vec3 b(0.0, 0.0, p.mass_kg * kGravity);
    sq += (b - r.c_f * a).squaredNorm();
  }
  r.residual_rms = std::sqrt(sq / static_cast<double>(data.size()));
  return r;
}

}  // namespace ndtsim
