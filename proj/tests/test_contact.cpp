#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ndtsim/contact.hpp"

using namespace ndtsim;

namespace {

SurfaceSpec wall() { return SurfaceSpec{}; }  // x = 1.5, normal -x

TipKinematics tip_at(double x, double vx = 0.0) {
  TipKinematics t;
  t.pos = Vec3(x, 0.0, 1.0);
  t.vel = Vec3(vx, 0.0, 0.0);
  return t;
}

// Drives the tip through a smooth approach/press/retreat with a concurrent
// yaw sweep, returning the per-step forces for continuity checks.
struct ScriptResult {
  std::vector<Vec3> forces;
  std::vector<bool> detach_events;
};

ScriptResult run_script(const ProbeSpec& probe) {
  ScriptResult out;
  ContactState c;
  const double dt = 1e-3;
  const double pi = std::numbers::pi;
  for (int k = 0; k < 4000; ++k) {
    const double t = k * dt;
    double x, vx, psi;
    if (t < 1.0) {
      // ease in to 2 cm past the plane
      x = 1.40 + 0.12 * std::sin(pi * t / 2) * std::sin(pi * t / 2);
      vx = 0.12 * (pi / 2) * std::sin(pi * t);
      psi = 0.0;
    } else {
      const double u = t - 1.0;
      x = 1.52 - 0.30 * std::sin(pi * u / 3) * std::sin(pi * u / 3);
      vx = -0.30 * (pi / 3) * std::sin(2 * pi * u / 3);
      psi = 1.0 * u;  // sweep toward the release yaw
    }
    const auto res = contact_step(c, tip_at(x, vx), wall(), probe, psi, dt);
    c = res.state;
    out.forces.push_back(res.f_ext_on_vehicle);
    out.detach_events.push_back(res.detached);
  }
  return out;
}

}  // namespace

TEST_SUITE("contact") {

TEST_CASE("probe_tip basic kinematics") {
  const ProbeSpec probe;
  VehicleParams vp;
  VehicleState s;
  CHECK((probe_tip(s, probe).pos - Vec3(0.3, 0, 0)).norm() < 1e-12);

  s = VehicleState::hover(Vec3::Zero(), std::numbers::pi / 2.0, vp);
  CHECK((probe_tip(s, probe).pos - Vec3(0, 0.3, 0)).norm() < 1e-12);

  s = VehicleState::hover(Vec3(1, 2, 3), 0.0, vp);
  CHECK((probe_tip(s, probe).pos - Vec3(1.3, 2, 3)).norm() < 1e-12);
  CHECK((probe_tip(s, probe).axis - Vec3(1, 0, 0)).norm() < 1e-12);
}

TEST_CASE("no force out of range") {
  const ProbeSpec probe;
  ContactState c;
  const auto res = contact_step(c, tip_at(1.4), wall(), probe, 0.0, 1e-3);
  CHECK(res.f_ext_on_vehicle.norm() == 0.0);
  CHECK_FALSE(res.state.attached);
}

TEST_CASE("static compression pushes back by Hooke's law plus z coupling") {
  ProbeSpec probe;
  ContactState c;
  c.attached = true;
  c.hood_seated = true;
  // tip 1 mm past the plane
  const auto res = contact_step(c, tip_at(1.501), wall(), probe, 0.0, 1e-3);
  CHECK(res.state.compression == doctest::Approx(1e-3));
  // push-back 2.0 N along +normal = -x
  CHECK(res.f_ext_on_vehicle.x() == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(res.f_ext_on_vehicle.z() ==
        doctest::Approx(probe.z_coupling * 1e-3).epsilon(1e-9));
  CHECK(res.state.interface_normal_force == doctest::Approx(2.0 + probe.f_adhesion));
}

TEST_CASE("tension beyond breakaway releases the latch") {
  ProbeSpec probe;
  ContactState c;
  c.attached = true;
  c.hood_seated = true;
  c.yaw_at_attach = 0.0;
  // stretched 8 mm -> 16 N demanded > 15 N capacity at zero relative yaw
  const auto res = contact_step(c, tip_at(1.5 - 0.008), wall(), probe, 0.0, 1e-3);
  CHECK(res.detached);
  CHECK_FALSE(res.state.attached);
  CHECK(res.f_ext_on_vehicle.norm() == 0.0);
  CHECK_FALSE(res.state.couplant_age.has_value());
}

TEST_CASE("breakaway force profile") {
  ProbeSpec probe;
  CHECK(breakaway_force(probe, 0.0) == doctest::Approx(probe.f_breakaway_0));
  CHECK(breakaway_force(probe, probe.yaw_release) == doctest::Approx(0.0));
  probe.f_breakaway_0 = 8.0;
  CHECK(breakaway_force(probe, probe.yaw_release / 2.0) == doctest::Approx(4.0));
}

TEST_CASE("breakaway is non-increasing and zero past the release yaw") {
  const ProbeSpec probe;
  double prev = breakaway_force(probe, 0.0);
  for (int i = 1; i <= 100; ++i) {
    const double psi = std::numbers::pi * i / 100.0;
    const double f = breakaway_force(probe, psi);
    CHECK(f <= prev + 1e-12);
    if (psi >= probe.yaw_release) CHECK(f == 0.0);
    prev = f;
  }
}

TEST_CASE("couplant dispensing, aging, and clearing") {
  ProbeSpec probe;
  ContactState c;
  c.attached = true;
  c.hood_seated = true;

  SUBCASE("never dispensed") { CHECK_FALSE(c.couplant_age.has_value()); }

  SUBCASE("ages while stepped") {
    auto d = dispense_couplant(c);
    CHECK_FALSE(d.without_contact);
    c = d.state;
    for (int i = 0; i < 1000; ++i) {
      c = contact_step(c, tip_at(1.5005), wall(), probe, 0.0, 1e-3).state;
    }
    CHECK(*c.couplant_age == doctest::Approx(1.0));
  }

  SUBCASE("cleared on detach") {
    c = dispense_couplant(c).state;
    c.yaw_at_attach = 0.0;
    // force a breakaway: big stretch at full release yaw
    const auto res =
        contact_step(c, tip_at(1.48), wall(), probe, probe.yaw_release, 1e-3);
    CHECK(res.detached);
    CHECK_FALSE(res.state.couplant_age.has_value());
  }

  SUBCASE("dispensing without contact warns") {
    ContactState free_state;
    CHECK(dispense_couplant(free_state).without_contact);
  }
}

TEST_CASE("ut_sample quality gates") {
  const SurfaceSpec surf = wall();
  UTQualityConfig cfg;
  Rng rng(3);
  UTSampler sampler;

  SUBCASE("not attached -> no signal") {
    ContactState c;
    const auto r = sampler.sample(c, 0.0, surf, cfg, 0.1, rng);
    CHECK(r.quality == UTQuality::NoSignal);
  }

  SUBCASE("excess pressure -> unstable") {
    ContactState c;
    c.attached = true;
    c.couplant_age = 0.1;
    c.interface_normal_force = 8.0;  // above f_hi
    const auto r = sampler.sample(c, 0.0, surf, cfg, 0.1, rng);
    CHECK(r.quality == UTQuality::Unstable);
  }

  SUBCASE("in-band force held for the dwell -> good_stable, thickness ~3 mm") {
    ContactState c;
    c.attached = true;
    c.couplant_age = 0.0;
    c.interface_normal_force = 2.0;
    UTReading r;
    double mean = 0.0;
    int n = 0;
    for (int i = 0; i < 25; ++i) {
      r = sampler.sample(c, 0.0, surf, cfg, 0.1, rng);
      mean += r.thickness_mm;
      ++n;
    }
    CHECK(r.quality == UTQuality::GoodStable);
    CHECK(r.stable_duration >= cfg.t_stable);
    CHECK(mean / n == doctest::Approx(3.0).epsilon(0.01));
  }

  SUBCASE("slip resets the dwell") {
    ContactState c;
    c.attached = true;
    c.couplant_age = 0.0;
    c.interface_normal_force = 2.0;
    for (int i = 0; i < 19; ++i) (void)sampler.sample(c, 0.0, surf, cfg, 0.1, rng);
    (void)sampler.sample(c, 0.1, surf, cfg, 0.1, rng);  // slip event
    const auto r = sampler.sample(c, 0.0, surf, cfg, 0.1, rng);
    CHECK(r.quality == UTQuality::Unstable);
    CHECK(r.stable_duration == doctest::Approx(0.1));
  }
}

TEST_CASE("contact force is continuous except at the single detach") {
  const ProbeSpec probe;
  const auto script = run_script(probe);
  // slew bound per 1 ms step: spring loading + hood pull-in ramp + damping
  // and z-coupling slews, padded 3x
  const double bound = 4.0;
  int detaches = 0;
  double detach_jump = 0.0;
  for (size_t i = 1; i < script.forces.size(); ++i) {
    const double jump = (script.forces[i] - script.forces[i - 1]).norm();
    if (script.detach_events[i]) {
      ++detaches;
      detach_jump = jump;
      continue;
    }
    CHECK(jump <= bound);
  }
  CHECK(detaches == 1);
  CHECK(detach_jump > bound);  // the release really is the one discontinuity
}

TEST_CASE("detach never happens while the spring is compressed") {
  ProbeSpec probe;
  // random-ish jittery motion across the surface, all yaws
  Rng rng(11);
  ContactState c;
  double x = 1.42, psi = 0.0;
  const double dt = 1e-3;
  for (int k = 0; k < 20000; ++k) {
    x += gaussian(rng, 0.003);
    x = std::clamp(x, 1.35, 1.55);
    psi += gaussian(rng, 0.01);
    const double compression = x - 1.5;  // tip past the plane
    const auto res = contact_step(c, tip_at(x), wall(), probe, psi, dt);
    if (res.detached) {
      // release only from tension, never while pushing
      CHECK(compression <= 0.0);
    }
    c = res.state;
  }
}

TEST_CASE("no force contribution while unattached beyond capture range") {
  const ProbeSpec probe;
  ContactState c;
  for (double x = 1.0; x < 1.5 - probe.capture_dist - 1e-6; x += 0.01) {
    const auto res = contact_step(c, tip_at(x), wall(), probe, 0.0, 1e-3);
    CHECK(res.f_ext_on_vehicle.norm() == 0.0);
    CHECK_FALSE(res.state.attached);
    c = res.state;
  }
}

TEST_CASE("non-ferromagnetic surface never latches") {
  const ProbeSpec probe;
  SurfaceSpec surf = wall();
  surf.ferromagnetic = false;
  ContactState c;
  // press through the plane: pure unilateral contact
  auto res = contact_step(c, tip_at(1.502, 0.05), surf, probe, 0.0, 1e-3);
  CHECK_FALSE(res.state.attached);
  CHECK(res.f_ext_on_vehicle.x() < 0.0);  // pushes back
  // and no pull once the tip leaves
  res = contact_step(res.state, tip_at(1.49, -0.05), surf, probe, 0.0, 1e-3);
  CHECK(res.f_ext_on_vehicle.norm() == 0.0);
}

TEST_CASE("interface force respects adhesion floor while compressed") {
  ProbeSpec probe;
  probe.f_adhesion = 0.5;
  ContactState c;
  c.attached = true;
  c.hood_seated = true;
  const auto res = contact_step(c, tip_at(1.5004), wall(), probe, 0.0, 1e-3);
  CHECK(res.state.interface_normal_force >= probe.f_adhesion);
}

}  // TEST_SUITE
