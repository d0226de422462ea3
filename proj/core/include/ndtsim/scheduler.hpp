#pragma once

#include <functional>
#include <string>

#include "ndtsim/log.hpp"
#include "ndtsim/scenario.hpp"

namespace ndtsim {

enum class RunOutcome { Success, Aborted, Incomplete };

const char* outcome_name(RunOutcome o);

struct PhaseEvent {
  double t = 0.0;
  MissionPhase phase = MissionPhase::Idle;
};

/// Optional taps on the fixed-rate slots, mainly for tests and the
/// identification experiment.
struct RunHooks {
  std::function<void(double t, const SensorReadings&, const ForceEstimate&)>
      on_observer;
  std::function<void(double t, const ReferenceSetpoint& desired,
                     const ReferenceSetpoint& compliant, MissionPhase)>
      on_planner;
  std::function<void(double t, const AccelYawRateCmd&)> on_control;
};

struct RunResult {
  RunLog log;
  RunOutcome outcome = RunOutcome::Incomplete;
  std::string abort_reason;
  std::vector<PhaseEvent> phase_events;
  double wall_time_s = 0.0;
};

/// Deterministic fixed-step executive. Per physics tick, in order:
/// environment (contact forces) -> dynamics -> sensors; then, on their rate
/// boundaries: observer, UT sampling, planner (trajectory sample, mission
/// tick, admittance), controller. Cross-rate signals are zero-order-held.
/// The result is a pure function of the scenario, including its seed.
RunResult run(const Scenario& scenario, const RunHooks& hooks = {});

/// Aggregate tracking/contact/measurement metrics of one run.
struct RunMetrics {
  Vec3 rmse = Vec3::Zero();  // of (ref - truth) over the active mission span
  Vec2 yz_contact_error = Vec2::Zero();  // mean |des - truth| while attached
  double steady_contact_force = 0.0;     // mean interface force, good_stable
  double good_stable_duration = 0.0;     // s
  double detach_recovery = 0.0;  // s until |ref - truth| stays < 2 cm
  double thickness_mean_mm = 0.0;
  double thickness_std_mm = 0.0;
  RunOutcome outcome = RunOutcome::Incomplete;
};

/// Computes metrics from a log. With require_contact (the default) a log
/// whose mission never attached raises NoContactPhase; otherwise the contact
/// metrics are left NaN.
RunMetrics compute_metrics(const RunLog& log, bool require_contact = true);

std::string metrics_table(const RunMetrics& m);
std::string metrics_csv_header(bool with_seed);
std::string metrics_csv_row(const RunMetrics& m, std::uint64_t seed,
                            bool with_seed);
/// Parses a metrics CSV (as written above) into name/value pairs; outcome is
/// returned as its enum index.
std::vector<std::pair<std::string, double>> read_metrics_csv(
    const std::string& path);

}  // namespace ndtsim
