#include "ndtsim/contact.hpp"

#include <algorithm>
#include <cmath>

#include "ndtsim/errors.hpp"

namespace ndtsim {

void SurfaceSpec::validate() const {
  if (std::abs(normal.norm() - 1.0) > 1e-6) {
    throw ConfigError("surface.normal must be a unit vector");
  }
  if (!(true_thickness_mm > 0.0)) {
    throw ConfigError("surface.true_thickness_mm must be > 0");
  }
}

void ProbeSpec::validate() const {
  if (!(k_spring > 0.0)) throw ConfigError("probe.k_spring must be > 0");
  if (!(capture_dist > 0.0)) throw ConfigError("probe.capture_dist must be > 0");
  if (!(d_spring >= 0.0)) throw ConfigError("probe.d_spring must be >= 0");
  if (!(f_breakaway_0 >= f_adhesion) || !(f_adhesion >= 0.0)) {
    throw ConfigError("probe needs f_breakaway_0 >= f_adhesion >= 0");
  }
  if (!(yaw_release > 0.0)) throw ConfigError("probe.yaw_release must be > 0");
  if (std::abs(axis_body.norm() - 1.0) > 1e-6) {
    throw ConfigError("probe.axis_body must be a unit vector");
  }
  if (!(hood_pull_speed > 0.0)) {
    throw ConfigError("probe.hood_pull_speed must be > 0");
  }
}

void UTQualityConfig::validate() const {
  if (!(f_lo >= 0.0) || !(f_hi > f_lo)) {
    throw ConfigError("probe UT force band needs 0 <= f_lo < f_hi");
  }
  if (!(t_stable > 0.0)) throw ConfigError("probe.t_stable must be > 0");
  if (!(sigma_ut_mm >= 0.0)) throw ConfigError("probe.sigma_ut_mm must be >= 0");
}

TipKinematics probe_tip(const VehicleState& state, const ProbeSpec& probe) {
  TipKinematics tip;
  const Mat3 R = state.R();
  tip.pos = state.p + R * probe.offset_body;
  tip.axis = R * probe.axis_body;
  tip.vel = state.v;
  return tip;
}

double breakaway_force(const ProbeSpec& probe, double psi_rel) {
  return probe.f_breakaway_0 * std::max(0.0, 1.0 - psi_rel / probe.yaw_release);
}

namespace {

// Damping fades in over the first damp_ref_depth of penetration so the
// damper force stays continuous at first touch.
double damping_fade(const ProbeSpec& probe, double depth) {
  return probe.damp_ref_depth > 0.0
             ? std::min(1.0, depth / probe.damp_ref_depth)
             : 1.0;
}

// Unattached penetration: unilateral spring-damper (dissipates on approach
// only, free separation).
double penetration_force(const ProbeSpec& probe, double d, double ddot) {
  const double depth = -d;
  return probe.k_spring * depth +
         probe.d_spring * std::max(-ddot, 0.0) * damping_fade(probe, depth);
}

// Attached and compressed: the magnet keeps the interface closed, so the
// damper works in both directions.
double attached_compression_force(const ProbeSpec& probe, double d, double ddot) {
  const double depth = -d;
  return probe.k_spring * depth +
         probe.d_spring * (-ddot) * damping_fade(probe, depth);
}

}  // namespace

ContactStepResult contact_step(const ContactState& contact,
                               const TipKinematics& tip,
                               const SurfaceSpec& surface,
                               const ProbeSpec& probe, double psi, double dt) {
  ContactStepResult out;
  ContactState& s = out.state;
  s = contact;

  const double d = surface.normal.dot(tip.pos - surface.point);  // signed gap
  const double ddot = surface.normal.dot(tip.vel);

  if (s.couplant_age) *s.couplant_age += dt;

  if (!s.attached) {
    if (d > probe.capture_dist) s.capture_armed = true;
    if (s.capture_armed && d <= probe.capture_dist && surface.ferromagnetic) {
      s.attached = true;
      s.yaw_at_attach = psi;
      s.hood_travel = 0.0;
      s.hood_seated = d <= 0.0;
    }
  }

  if (!s.attached) {
    s.compression = std::max(-d, 0.0);
    double f_n = 0.0;
    if (d <= 0.0) f_n = penetration_force(probe, d, ddot);
    s.interface_normal_force = std::max(f_n, 0.0);
    out.f_ext_on_vehicle = surface.normal * f_n;
    return out;
  }

  // Attached.
  s.compression = -d;
  if (d <= 0.0) s.hood_seated = true;

  double f_n;
  if (d > 0.0) {
    // Hood stretched: transmitted tension is limited by how far the hood has
    // been pulled toward the wall until it seats.
    if (!s.hood_seated) {
      s.hood_travel += probe.hood_pull_speed * dt;
      if (s.hood_travel >= d) s.hood_seated = true;
    }
    const double stretch = s.hood_seated ? d : std::min(s.hood_travel, d);
    const double tension = probe.k_spring * stretch;
    const double psi_rel = std::abs(angle_diff(psi, s.yaw_at_attach));
    if (tension > breakaway_force(probe, psi_rel)) {
      // Magnet lets go: the one discontinuity in the contact force.
      out.detached = true;
      s.attached = false;
      s.hood_seated = false;
      s.hood_travel = 0.0;
      s.capture_armed = false;
      s.couplant_age.reset();
      s.compression = 0.0;
      s.interface_normal_force = 0.0;
      out.f_ext_on_vehicle = Vec3::Zero();
      return out;
    }
    f_n = -tension;
  } else {
    f_n = attached_compression_force(probe, d, ddot);
  }

  Vec3 f = surface.normal * f_n;
  f += Vec3::UnitZ() * (probe.z_coupling * std::max(s.compression, 0.0));
  s.interface_normal_force =
      std::max(probe.k_spring * s.compression, 0.0) + probe.f_adhesion;
  out.f_ext_on_vehicle = f;
  return out;
}

DispenseResult dispense_couplant(const ContactState& contact) {
  DispenseResult r;
  r.state = contact;
  r.state.couplant_age = 0.0;
  r.without_contact = !contact.attached;
  return r;
}

UTReading UTSampler::sample(const ContactState& contact,
                            double lateral_tip_speed,
                            const SurfaceSpec& surface,
                            const UTQualityConfig& cfg, double dt_sample,
                            Rng& rng) {
  UTReading r;
  const bool coupled = contact.attached && contact.couplant_age &&
                       *contact.couplant_age <= cfg.t_couplant_life;
  if (!coupled) {
    stable_time_ = 0.0;
    r.quality = UTQuality::NoSignal;
    return r;
  }

  const bool in_band = contact.interface_normal_force >= cfg.f_lo &&
                       contact.interface_normal_force <= cfg.f_hi;
  const bool no_slip = lateral_tip_speed <= cfg.v_slip_max;
  if (in_band && no_slip) {
    stable_time_ += dt_sample;
  } else {
    stable_time_ = 0.0;
  }

  r.stable_duration = stable_time_;
  r.quality = stable_time_ >= cfg.t_stable ? UTQuality::GoodStable
                                           : UTQuality::Unstable;
  r.thickness_mm = surface.true_thickness_mm + gaussian(rng, cfg.sigma_ut_mm);
  return r;
}

}  // namespace ndtsim
