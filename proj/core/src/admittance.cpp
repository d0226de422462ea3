#include "ndtsim/admittance.hpp"

#include "ndtsim/errors.hpp"

namespace ndtsim {

void AdmittanceConfig::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!(M[i] > 0.0) || !(D[i] > 0.0) || !(K[i] > 0.0)) {
      throw ConfigError("admittance M, D, K entries must be > 0");
    }
  }
}

AdmittanceFilter::AdmittanceFilter(const AdmittanceConfig& cfg, double dt)
    : cfg_(cfg) {
  cfg.validate();
  for (int i = 0; i < 3; ++i) {
    zoh_[static_cast<size_t>(i)] = SecondOrderZoh(cfg.M[i], cfg.D[i], cfg.K[i], dt);
  }
}

void AdmittanceFilter::reset() { state_ = AdmittanceState{}; }

ReferenceSetpoint AdmittanceFilter::step(const Vec3& f_ext_hat,
                                         const ReferenceSetpoint& desired) {
  if (!finite(f_ext_hat)) throw NonFiniteInput("non-finite force estimate");
  Vec3 e_ddot;
  for (int i = 0; i < 3; ++i) {
    const double u = -f_ext_hat[i];
    zoh_[static_cast<size_t>(i)].step(state_.e[i], state_.e_dot[i], u);
    // compliant acceleration from the ODE right-hand side at the new state
    e_ddot[i] = (u - cfg_.D[i] * state_.e_dot[i] - cfg_.K[i] * state_.e[i]) / cfg_.M[i];
  }
  ReferenceSetpoint out = desired;
  out.p = desired.p - state_.e;
  out.v = desired.v - state_.e_dot;
  out.a = desired.a - e_ddot;
  return out;
}

double depth_for_force(double f_desired, const AdmittanceConfig& cfg,
                       const Vec3& axis) {
  const double k_eff = axis.dot(cfg.K.asDiagonal() * axis);
  if (!(k_eff > 0.0)) {
    throw ZeroStiffness("no stiffness along the requested axis");
  }
  return f_desired / k_eff;
}

}  // namespace ndtsim
