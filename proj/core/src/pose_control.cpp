#include "ndtsim/pose_control.hpp"

#include <cmath>

#include "ndtsim/errors.hpp"
#include "ndtsim/math.hpp"

namespace ndtsim {

void ControllerGains::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(Kp[i] > 0.0) || !(Kv[i] > 0.0)) {
      throw ConfigError("gains.Kp and gains.Kv entries must be > 0");
    }
  }
  if (!(K_psi > 0.0)) throw ConfigError("gains.K_psi must be > 0");
}

Vec3 accel_command(const ReferenceSetpoint& ref, const Vec3& p, const Vec3& v,
                   const Vec3& f_ext_hat, const ControllerGains& gains,
                   double mass) {
  if (!finite(p) || !finite(v) || !finite(f_ext_hat) || !finite(ref.p) ||
      !finite(ref.v) || !finite(ref.a)) {
    throw NonFiniteInput("non-finite pose controller input");
  }
  return ref.a + gains.Kp.cwiseProduct(ref.p - p) +
         gains.Kv.cwiseProduct(ref.v - v) + Vec3(0.0, 0.0, kGravity) -
         f_ext_hat / mass;
}

double yaw_rate_command(double yaw_ref, double yaw_rate_ref, double yaw,
                        const ControllerGains& gains) {
  return yaw_rate_ref + gains.K_psi * angle_diff(yaw_ref, yaw);
}

}  // namespace ndtsim
