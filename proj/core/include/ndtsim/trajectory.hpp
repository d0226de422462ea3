#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ndtsim/types.hpp"

namespace ndtsim {

struct Waypoint {
  Vec3 p = Vec3::Zero();
  double yaw = 0.0;
  std::optional<Vec3> v;  // boundary constraint, rest when absent
  std::optional<Vec3> a;
};

struct TrajectoryLimits {
  double max_vel = 0.5;       // m/s
  double max_acc = 0.25;      // m/s^2
  double max_yaw_rate = 0.5;  // rad/s
  double max_yaw_acc = 0.5;   // rad/s^2

  void validate() const;
};

/// One sample of the (nominal or compliant) reference trajectory.
struct ReferenceSetpoint {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double t = 0.0;

  static ReferenceSetpoint hold(const Vec3& p, double yaw) {
    ReferenceSetpoint s;
    s.p = p;
    s.yaw = yaw;
    return s;
  }
};

/// Piecewise-polynomial trajectory: degree-9 position polynomials per axis
/// minimizing the integral of squared snap, with continuity through the 4th
/// derivative at interior waypoints, plus an independent degree-5 yaw
/// polynomial (continuous through yaw acceleration). Immutable after
/// construction; sampling is read-only.
class Trajectory {
 public:
  /// Solves the interpolation for the given fixed segment durations. Most
  /// callers want plan(), which also allocates durations and enforces limits.
  Trajectory(std::span<const Waypoint> waypoints,
             const std::vector<double>& durations);

  ReferenceSetpoint sample(double t) const;
  double total_duration() const { return total_duration_; }
  std::size_t num_segments() const { return segments_.size(); }
  const std::vector<double>& knot_times() const { return knots_; }

  /// Raw derivative evaluation for analysis/tests; order 0..5. Does not apply
  /// the end-of-trajectory zero-derivative clamp.
  Vec3 position_derivative(double t, int order) const;
  double yaw_derivative(double t, int order) const;

 private:
  struct Segment {
    double duration = 0.0;
    // normalized-time coefficients, evaluated at u = (t - t0)/duration
    std::array<std::array<double, 10>, 3> pos;
    std::array<double, 6> yaw;
  };

  std::vector<Segment> segments_;
  std::vector<double> knots_;  // cumulative start times, size segments+1
  double total_duration_ = 0.0;
  Vec3 end_p_ = Vec3::Zero();
  double end_yaw_ = 0.0;
};

/// Segment durations from a trapezoidal/triangular velocity profile over the
/// straight-line segment length (and the yaw sweep), floored at 0.1 s.
std::vector<double> allocate_times(std::span<const Waypoint> waypoints,
                                   const TrajectoryLimits& limits);

/// Minimum-snap interpolation of the waypoints with a limit check: the plan
/// is sampled at 100 Hz and all durations are scaled uniformly (velocity:
/// ratio, acceleration: sqrt of ratio) until the limits hold within 1%, at
/// most 5 times. Throws SolverSingular or LimitUnreachable.
Trajectory plan(std::span<const Waypoint> waypoints,
                const TrajectoryLimits& limits);

}  // namespace ndtsim
