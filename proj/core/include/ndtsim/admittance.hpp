#pragma once

#include <array>

#include "ndtsim/math.hpp"
#include "ndtsim/trajectory.hpp"
#include "ndtsim/types.hpp"

namespace ndtsim {

/// Diagonal virtual mass/damping/stiffness of the compliance filter.
struct AdmittanceConfig {
  Vec3 M = Vec3(0.5, 0.5, 0.5);     // kg
  Vec3 D = Vec3(7.5, 7.5, 7.5);     // N s/m
  Vec3 K = Vec3(30.0, 30.0, 100.0); // N/m

  void validate() const;
};

struct AdmittanceState {
  Vec3 e = Vec3::Zero();      // m, p_desired - p_reference
  Vec3 e_dot = Vec3::Zero();  // m/s
};

/// Second-order virtual dynamics mapping the estimated external force and the
/// nominal trajectory to a compliant reference. Each axis is a decoupled
/// scalar system M e'' + D e' + K e = -f_hat (f_hat is the force ON the
/// vehicle, so the reference yields to it), advanced with the exact
/// zero-order-hold discretization. Yaw passes through untouched.
class AdmittanceFilter {
 public:
  AdmittanceFilter(const AdmittanceConfig& cfg, double dt);

  void reset();
  ReferenceSetpoint step(const Vec3& f_ext_hat, const ReferenceSetpoint& desired);
  const AdmittanceState& state() const { return state_; }

 private:
  AdmittanceConfig cfg_;
  std::array<SecondOrderZoh, 3> zoh_;
  AdmittanceState state_;
};

/// Steady-state trajectory depth that produces a desired contact force along
/// the given axis: depth = f / (axis^T K axis). Throws ZeroStiffness.
double depth_for_force(double f_desired, const AdmittanceConfig& cfg,
                       const Vec3& axis);

}  // namespace ndtsim
