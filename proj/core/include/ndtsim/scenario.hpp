#pragma once

#include <cstdint>
#include <optional>

#include "ndtsim/admittance.hpp"
#include "ndtsim/contact.hpp"
#include "ndtsim/mission.hpp"
#include "ndtsim/observer.hpp"
#include "ndtsim/pose_control.hpp"
#include "ndtsim/trajectory.hpp"
#include "ndtsim/vehicle.hpp"

namespace ndtsim {

/// Loop rates in Hz. The physics rate must be an integer multiple of every
/// other rate.
struct Rates {
  double physics = 1000.0;
  double control = 200.0;
  double observer = 100.0;
  double planner = 50.0;
  double measurement = 10.0;
  double log = 100.0;

  void validate() const;
  /// Physics ticks per period of the given rate.
  int divisor(double rate) const;
};

struct RunConfig {
  double duration = 60.0;  // s
  std::uint64_t seed = 1;
  Vec3 start_position = Vec3(0.0, 0.0, 1.0);
  double start_yaw = 0.0;
  Vec3 aero_bias = Vec3::Zero();  // N, constant disturbance force (world)
  Rates rates;
  bool stop_on_terminal = false;  // end the loop once the mission terminates
};

/// Everything a deterministic run needs. One scenario = one seed = one
/// byte-reproducible log.
struct Scenario {
  VehicleParams vehicle;
  NoiseConfig noise;
  SurfaceSpec surface;
  ProbeSpec probe;
  UTQualityConfig ut;
  ObserverConfig observer;
  AdmittanceConfig admittance;
  ControllerGains gains;
  MissionConfig mission;
  TrajectoryLimits limits;
  RunConfig run;

  /// Inspection request; defaults to the surface point/normal.
  std::optional<InspectionRequest> request;
  bool autostart = true;
  double t_start = 1.0;  // s, autostart request time

  InspectionRequest effective_request() const;
  void validate() const;
};

}  // namespace ndtsim
