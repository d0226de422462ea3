#include <doctest.h>

#include <cmath>
#include <set>

#include "ndtsim/mission.hpp"

using namespace ndtsim;

namespace {

MissionFsm make_fsm(MissionConfig cfg = {}) {
  return MissionFsm(cfg, AdmittanceConfig{}, 0.3);
}

InspectionRequest wall_request() {
  InspectionRequest r;
  r.point = Vec3(1.5, 0.0, 1.0);
  r.normal = Vec3(-1.0, 0.0, 0.0);
  return r;
}

MissionInputs at(double t) {
  MissionInputs in;
  in.t = t;
  return in;
}

}  // namespace

TEST_SUITE("mission") {

TEST_CASE("approach waypoint is offset along the normal") {
  auto fsm = make_fsm();
  fsm.request_inspection(wall_request());
  const auto dir = fsm.tick(at(0.0));
  REQUIRE(dir.waypoints.has_value());
  REQUIRE(dir.waypoints->size() == 1);
  CHECK(((*dir.waypoints)[0].p - Vec3(1.0, 0.0, 1.0)).norm() < 1e-12);
  CHECK((*dir.waypoints)[0].yaw == doctest::Approx(0.0));  // probe faces +x
  CHECK(fsm.phase() == MissionPhase::ApproachInspection);
}

TEST_CASE("contact_detected compares the norm with the threshold") {
  CHECK_FALSE(contact_detected(Vec3(0.5, 0, 0), 1.0));
  CHECK(contact_detected(Vec3(-0.8, 0.8, 0), 1.0));  // norm 1.131
  CHECK_FALSE(contact_detected(Vec3::Zero(), 0.5));
}

TEST_CASE("detach waypoint construction") {
  MissionConfig cfg;
  SUBCASE("standard offsets") {
    const auto wps = detach_waypoints(Vec3(1.2, 0, 1), 0.0, Vec3(-1, 0, 0), cfg);
    REQUIRE(wps.size() == 1);
    CHECK((wps[0].p - Vec3(0.7, 0.3, 1.0)).norm() < 1e-12);
    CHECK(wps[0].yaw == doctest::Approx(cfg.detach_yaw));
  }
  SUBCASE("zero offsets give a pure yaw maneuver") {
    cfg.detach_back_offset = 0.0;
    cfg.detach_lateral_offset = 0.0;
    const auto wps = detach_waypoints(Vec3(1.2, 0, 1), 0.4, Vec3(-1, 0, 0), cfg);
    CHECK((wps[0].p - Vec3(1.2, 0, 1)).norm() < 1e-12);
    CHECK(wps[0].yaw == doctest::Approx(0.4 + cfg.detach_yaw));
  }
}

TEST_CASE("invalid poses are rejected") {
  auto fsm = make_fsm();
  InspectionRequest bad = wall_request();
  bad.normal = Vec3(-1.0, 0.0, -1.0);  // not unit
  CHECK_THROWS_AS(fsm.request_inspection(bad), InvalidPose);
  bad.normal = Vec3(0.0, 0.0, 1.0);  // vertical
  CHECK_THROWS_AS(fsm.request_inspection(bad), InvalidPose);
}

TEST_CASE("nominal transition walk") {
  MissionConfig cfg;
  auto fsm = make_fsm(cfg);
  fsm.request_inspection(wall_request());

  // Idle -> Approach
  auto dir = fsm.tick(at(0.0));
  CHECK(fsm.phase() == MissionPhase::ApproachInspection);

  // Approach completes at the waypoint
  MissionInputs in = at(5.0);
  in.odom_p = Vec3(1.0, 0.0, 1.0);
  dir = fsm.tick(in);
  CHECK(fsm.phase() == MissionPhase::PrepareContact);
  CHECK(dir.enable_admittance);
  CHECK(dir.estimate_bias);

  // PrepareContact waits for the bias window
  in = at(6.0);
  in.bias_ready = false;
  dir = fsm.tick(in);
  CHECK(fsm.phase() == MissionPhase::PrepareContact);

  in = at(5.0 + cfg.t_bias_window + 0.02);
  in.bias_ready = true;
  dir = fsm.tick(in);
  CHECK(fsm.phase() == MissionPhase::MoveForward);
  REQUIRE(dir.waypoints.has_value());
  // tip target depth 2/30 m past the wall, converted by the 0.3 m reach
  const double depth = 2.0 / 30.0;
  CHECK((*dir.waypoints)[0].p.x() == doctest::Approx(1.5 - (0.3 - depth)).epsilon(1e-12));
  REQUIRE(dir.leg_limits.has_value());
  CHECK(dir.leg_limits->max_vel == doctest::Approx(cfg.approach_speed));

  // contact latch above threshold, then trajectory done -> Measurement
  in = at(9.0);
  in.f_ext_hat = Vec3(1.2, 0.0, 0.0);
  in.trajectory_done = false;
  dir = fsm.tick(in);
  CHECK(fsm.phase() == MissionPhase::MoveForward);
  CHECK(fsm.state().contact_latched);

  in.trajectory_done = true;
  in.t = 10.0;
  dir = fsm.tick(in);
  CHECK(fsm.phase() == MissionPhase::PerformMeasurement);
  CHECK(dir.dispense_couplant);
  CHECK(dir.request_measurement);

  // couplant is dispensed once per entry, not on every measurement tick
  in.t = 10.5;
  dir = fsm.tick(in);
  CHECK_FALSE(dir.dispense_couplant);
  CHECK(dir.request_measurement);

  // good/stable reading -> Detach with the combined maneuver
  in = at(13.0);
  in.odom_p = Vec3(1.24, 0.0, 1.0);
  in.odom_yaw = 0.0;
  in.ut.quality = UTQuality::GoodStable;
  in.ut.thickness_mm = 3.01;
  dir = fsm.tick(in);
  CHECK(fsm.phase() == MissionPhase::Detach);
  REQUIRE(dir.waypoints.has_value());
  CHECK((*dir.waypoints)[0].yaw == doctest::Approx(cfg.detach_yaw));
  REQUIRE(fsm.state().measurement.has_value());
  CHECK(fsm.state().measurement->thickness_mm == doctest::Approx(3.01));

  // far enough from the surface -> Done
  in = at(16.0);
  in.odom_p = Vec3(1.5 - 0.41, 0.3, 1.0);
  dir = fsm.tick(in);
  CHECK(fsm.phase() == MissionPhase::Done);
  CHECK_FALSE(fsm.state().contact_latched);

  // terminal: no more directives
  dir = fsm.tick(at(17.0));
  CHECK_FALSE(dir.waypoints.has_value());
  CHECK_FALSE(dir.enable_admittance);
  CHECK_FALSE(dir.request_measurement);
}

TEST_CASE("timeouts abort from every active phase") {
  MissionConfig cfg;

  SUBCASE("approach timeout") {
    auto fsm = make_fsm(cfg);
    fsm.request_inspection(wall_request());
    fsm.tick(at(0.0));
    MissionInputs in = at(cfg.t_approach_max + 1.0);
    in.odom_p = Vec3::Zero();  // never arrives
    fsm.tick(in);
    CHECK(fsm.phase() == MissionPhase::Aborted);
    CHECK(fsm.state().abort_reason == "approach timeout");
  }

  SUBCASE("contact timeout") {
    auto fsm = make_fsm(cfg);
    fsm.request_inspection(wall_request());
    fsm.tick(at(0.0));
    MissionInputs in = at(1.0);
    in.odom_p = Vec3(1.0, 0.0, 1.0);
    fsm.tick(in);                                      // -> PrepareContact
    fsm.tick(at(1.0 + cfg.t_bias_window + 0.02));      // -> MoveForward
    MissionInputs stuck = at(1.0 + cfg.t_bias_window + cfg.t_contact_max + 1.0);
    fsm.tick(stuck);
    CHECK(fsm.phase() == MissionPhase::Aborted);
    CHECK(fsm.state().abort_reason == "contact timeout");
  }

  SUBCASE("measurement timeout") {
    auto fsm = make_fsm(cfg);
    fsm.request_inspection(wall_request());
    fsm.tick(at(0.0));
    MissionInputs in = at(1.0);
    in.odom_p = Vec3(1.0, 0.0, 1.0);
    fsm.tick(in);
    fsm.tick(at(1.0 + cfg.t_bias_window + 0.02));
    MissionInputs contact = at(4.0);
    contact.f_ext_hat = Vec3(2.0, 0, 0);
    contact.trajectory_done = true;
    fsm.tick(contact);  // -> PerformMeasurement
    REQUIRE(fsm.phase() == MissionPhase::PerformMeasurement);
    fsm.tick(at(4.0 + cfg.t_measurement_max + 1.0));
    CHECK(fsm.phase() == MissionPhase::Aborted);
    CHECK(fsm.state().abort_reason == "measurement timeout");
  }
}

TEST_CASE("transition closure: only the nominal chain plus aborts") {
  // fuzz the FSM with arbitrary inputs; every observed transition must be an
  // edge of the flow diagram (or an abort edge)
  const std::set<std::pair<int, int>> allowed = {
      {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7},
      {2, 8}, {3, 8}, {4, 8}, {5, 8}, {6, 8},
  };
  Rng rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto fsm = make_fsm();
    fsm.request_inspection(wall_request());
    double t = 0.0;
    int prev = static_cast<int>(fsm.phase());
    for (int step = 0; step < 4000 && !fsm.terminal(); ++step) {
      t += 0.02 + u(rng) * (u(rng) < 0.02 ? 30.0 : 0.1);  // occasional big jumps
      MissionInputs in;
      in.t = t;
      in.f_ext_hat = Vec3(u(rng) * 3.0, 0.0, 0.0);
      in.odom_p = Vec3(u(rng) * 2.0, u(rng) - 0.5, 1.0 + 0.2 * u(rng));
      in.odom_yaw = u(rng);
      in.trajectory_done = u(rng) < 0.7;
      in.bias_ready = u(rng) < 0.8;
      if (u(rng) < 0.3) in.ut.quality = UTQuality::GoodStable;
      fsm.tick(in);
      const int cur = static_cast<int>(fsm.phase());
      if (cur != prev) {
        CHECK(allowed.count({prev, cur}) == 1);
        prev = cur;
      }
    }
  }
}

TEST_CASE("contact latch stays false outside MoveForward..Detach") {
  auto fsm = make_fsm();
  fsm.request_inspection(wall_request());
  MissionInputs in = at(0.0);
  in.f_ext_hat = Vec3(5.0, 0.0, 0.0);  // force present the whole time
  fsm.tick(in);
  CHECK_FALSE(fsm.state().contact_latched);  // Approach ignores it
  in.t = 1.0;
  in.odom_p = Vec3(1.0, 0.0, 1.0);
  fsm.tick(in);
  CHECK(fsm.phase() == MissionPhase::PrepareContact);
  CHECK_FALSE(fsm.state().contact_latched);
}

}  // TEST_SUITE
