#pragma once

#include <optional>

#include "ndtsim/math.hpp"
#include "ndtsim/types.hpp"
#include "ndtsim/vehicle.hpp"

namespace ndtsim {

/// Planar inspection surface. The normal points away from the material into
/// free space.
struct SurfaceSpec {
  Vec3 point = Vec3(1.5, 0.0, 1.0);   // m, a point on the plane
  Vec3 normal = Vec3(-1.0, 0.0, 0.0); // unit
  double true_thickness_mm = 3.0;
  bool ferromagnetic = true;

  void validate() const;
};

/// Cage-mounted compliant probe with a magnetic hood.
struct ProbeSpec {
  Vec3 offset_body = Vec3(0.3, 0.0, 0.0);  // m, tip position in body frame
  Vec3 axis_body = Vec3(1.0, 0.0, 0.0);    // unit, pointing direction
  double k_spring = 2000.0;   // N/m
  double d_spring = 250.0;    // N s/m
  double z_coupling = 300.0;  // N/m, upward force per meter of compression
  double f_adhesion = 0.05;   // N, magnetic clamp force at the interface
  double f_breakaway_0 = 15.0;  // N, tension capacity at the attach yaw
  double yaw_release = 1.0472;  // rad, tension capacity reaches zero here
  double capture_dist = 0.005;  // m, magnetic capture range
  // Model internals keeping the contact force continuous: the hood closes a
  // captured gap at hood_pull_speed, and penetration damping fades in over
  // damp_ref_depth so the damper does not jump at first touch.
  double hood_pull_speed = 0.25;  // m/s
  double damp_ref_depth = 0.002;  // m

  void validate() const;
};

enum class UTQuality { NoSignal = 0, Unstable = 1, GoodStable = 2 };

struct UTReading {
  double thickness_mm = 0.0;
  UTQuality quality = UTQuality::NoSignal;
  double stable_duration = 0.0;  // s the good condition has held
};

struct UTQualityConfig {
  double f_lo = 0.7;   // N, lower interface-force bound for a usable signal
  double f_hi = 6.0;   // N, upper bound (excess pressure squeezes couplant)
  double v_slip_max = 0.02;  // m/s, lateral tip speed bound
  double t_stable = 2.0;     // s, dwell for good_stable
  double sigma_ut_mm = 0.02; // mm, thickness readout noise
  double t_couplant_life = 30.0;  // s

  void validate() const;
};

struct ContactState {
  bool attached = false;
  double compression = 0.0;  // m, negative while the hood is stretched
  double yaw_at_attach = 0.0;
  std::optional<double> couplant_age;  // s
  double interface_normal_force = 0.0;  // N, probe-surface pressure
  // hood pull-in bookkeeping (see ProbeSpec)
  double hood_travel = 0.0;
  bool hood_seated = false;
  // after a breakaway the magnet cannot re-grab until the tip has cleared the
  // capture range once
  bool capture_armed = true;
};

struct TipKinematics {
  Vec3 pos = Vec3::Zero();
  Vec3 axis = Vec3::UnitX();
  Vec3 vel = Vec3::Zero();
};

/// Probe tip pose/velocity from the vehicle state. The angular-velocity
/// contribution to tip velocity is neglected (yaw-dominant motion, short
/// offset).
TipKinematics probe_tip(const VehicleState& state, const ProbeSpec& probe);

/// Tension the magnetic hood can transmit at a relative yaw psi_rel from the
/// attach heading, in [0, pi]. Linear to zero at yaw_release.
double breakaway_force(const ProbeSpec& probe, double psi_rel);

struct ContactStepResult {
  ContactState state;
  Vec3 f_ext_on_vehicle = Vec3::Zero();  // N, world frame
  bool detached = false;  // a breakaway release happened this step
};

/// One physics step of the probe-surface interaction. Gap d is the signed
/// distance tip-to-plane along the surface normal; negative d compresses the
/// spring and pushes the vehicle away, positive d while attached stretches
/// the hood and pulls the vehicle in until breakaway.
ContactStepResult contact_step(const ContactState& contact,
                               const TipKinematics& tip,
                               const SurfaceSpec& surface,
                               const ProbeSpec& probe, double psi, double dt);

struct DispenseResult {
  ContactState state;
  bool without_contact = false;  // warning: gel dispensed into free air
};

/// Resets the couplant age. The age then advances with each contact_step and
/// clears on detach.
DispenseResult dispense_couplant(const ContactState& contact);

/// UT measurement model with dwell tracking: the reading becomes good_stable
/// once coupling, interface force band, and slip bounds hold continuously for
/// t_stable.
class UTSampler {
 public:
  UTReading sample(const ContactState& contact, double lateral_tip_speed,
                   const SurfaceSpec& surface, const UTQualityConfig& cfg,
                   double dt_sample, Rng& rng);
  void reset() { stable_time_ = 0.0; }

 private:
  double stable_time_ = 0.0;
};

}  // namespace ndtsim
