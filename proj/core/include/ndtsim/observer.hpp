#pragma once

#include <span>
#include <vector>

#include "ndtsim/types.hpp"
#include "ndtsim/vehicle.hpp"

namespace ndtsim {

struct ObserverConfig {
  Vec3 L = Vec3(7.5, 7.5, 7.5);  // 1/s, per-axis observer gain
  double omega_c = 31.42;        // rad/s, low-pass cutoff

  void validate(double dt) const;
};

/// Observer state. The consumable output is filtered minus bias.
struct ForceEstimate {
  Vec3 f_hat = Vec3::Zero();           // integrator state, world frame
  Vec3 f_hat_filtered = Vec3::Zero();  // after the first-order low-pass
  Vec3 bias = Vec3::Zero();            // frozen in-flight bias estimate

  Vec3 output() const { return f_hat_filtered - bias; }
};

/// One observer step. The residual m*R*imu - f_rot equals the external force
/// for an exact model; the integrator tracks it per axis with the exact
/// scalar discretization f+ = e^(-L dt) f + (1 - e^(-L dt)) r, followed by the
/// low-pass.
ForceEstimate observer_update(const ForceEstimate& est,
                              const Vec3& imu_accel_body, const Quat& odom_q,
                              const Vec4& rotor_speeds_meas,
                              const VehicleParams& params,
                              const ObserverConfig& cfg, double dt);

/// Arithmetic mean of a contact-free window of filtered estimates. Throws
/// InsufficientSamples below 10 samples.
Vec3 estimate_bias(std::span<const Vec3> history);

/// One hover experiment: known total mass, windowed mean rotor speeds and
/// attitude.
struct IdPoint {
  double mass_kg = 0.0;
  Vec4 mean_rotor_speeds = Vec4::Zero();
  Mat3 mean_R = Mat3::Identity();
};

struct IdResult {
  double c_f = 0.0;
  double residual_rms = 0.0;  // N
};

/// Scalar least-squares fit of the thrust coefficient from hover force
/// balance: stacking b_j = m_j g e3 against a_j = R_j sum |w|w z_i gives
/// c_f = sum(a.b) / sum(a.a).
IdResult identify_cf(std::span<const IdPoint> data, const VehicleParams& params);

}  // namespace ndtsim
