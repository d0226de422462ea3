#include "ndtsim/scheduler.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ndtsim/errors.hpp"
#include "ndtsim/pose_control.hpp"

namespace ndtsim {

const char* outcome_name(RunOutcome o) {
  switch (o) {
    case RunOutcome::Success: return "success";
    case RunOutcome::Aborted: return "aborted";
    case RunOutcome::Incomplete: return "incomplete";
  }
  return "?";
}

namespace {

// Probe reach along the anti-normal direction at the yaw-aligned attitude;
// converts tip targets to vehicle waypoints.
double probe_reach(const ProbeSpec& probe, const Vec3& normal) {
  const double yaw = std::atan2(-normal.y(), -normal.x());
  const Mat3 R = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
  return -normal.dot(R * probe.offset_body);
}

struct Engine {
  explicit Engine(const Scenario& sc, const RunHooks& hooks)
      : sc(sc),
        hooks(hooks),
        dt(1.0 / sc.run.rates.physics),
        ctrl_div(sc.run.rates.divisor(sc.run.rates.control)),
        obs_div(sc.run.rates.divisor(sc.run.rates.observer)),
        plan_div(sc.run.rates.divisor(sc.run.rates.planner)),
        meas_div(sc.run.rates.divisor(sc.run.rates.measurement)),
        log_div(sc.run.rates.divisor(sc.run.rates.log)),
        rng(sc.run.seed),
        state(VehicleState::hover(sc.run.start_position, sc.run.start_yaw,
                                  sc.vehicle)),
        admittance(sc.admittance, 1.0 / sc.run.rates.planner),
        fsm(sc.mission, sc.admittance,
            probe_reach(sc.probe, sc.effective_request().normal)) {
    desired = ReferenceSetpoint::hold(sc.run.start_position, sc.run.start_yaw);
    compliant = desired;
    cmd = AccelYawRateCmd{};  // hover hold
    readings = sense(state, Vec3::Zero(), NoiseConfig::zero(), sc.vehicle, rng);
  }

  const Scenario& sc;
  const RunHooks& hooks;
  const double dt;
  const int ctrl_div, obs_div, plan_div, meas_div, log_div;

  Rng rng;
  VehicleState state;
  ContactState contact;
  ForceEstimate est;
  AdmittanceFilter admittance;
  bool admittance_enabled = false;
  MissionFsm fsm;
  UTSampler ut_sampler;
  UTReading ut_reading;

  std::optional<Trajectory> traj;
  double traj_t0 = 0.0;
  ReferenceSetpoint desired, compliant;
  AccelYawRateCmd cmd;
  SensorReadings readings;
  Vec3 f_ext = Vec3::Zero();

  // bias estimation window
  std::vector<Vec3> bias_hist;
  bool bias_collecting = false;
  bool bias_ready = true;
  size_t bias_target_samples = 0;

  bool requested = false;

  RunResult result;

  bool trajectory_done(double t_now) const {
    return !traj || (t_now - traj_t0) >= traj->total_duration();
  }

  void plan_leg(const std::vector<Waypoint>& targets,
                const std::optional<TrajectoryLimits>& leg_limits, double t_now) {
    std::vector<Waypoint> wps;
    Waypoint start;
    start.p = desired.p;
    start.yaw = desired.yaw;
    wps.push_back(start);
    wps.insert(wps.end(), targets.begin(), targets.end());
    traj = plan(wps, leg_limits ? *leg_limits : sc.limits);
    traj_t0 = t_now;
  }

  void planner_tick(double t_now) {
    // nominal reference from the active leg, then mission, then compliance
    if (traj) {
      desired = traj->sample(t_now - traj_t0);
      desired.t = t_now;
    }

    // mission autostart
    if (!requested && sc.autostart && t_now >= sc.t_start &&
        fsm.phase() == MissionPhase::Idle) {
      fsm.request_inspection(sc.effective_request());
      requested = true;
    }

    MissionInputs in;
    in.f_ext_hat = est.output();
    in.odom_p = readings.odom_p;
    in.odom_yaw = yaw_from_quat(readings.odom_q);
    in.ut = ut_reading;
    in.trajectory_done = trajectory_done(t_now);
    in.bias_ready = bias_ready;
    in.t = t_now;

    const MissionPhase before = fsm.phase();
    const MissionDirectives dir = fsm.tick(in);
    if (fsm.phase() != before) {
      result.phase_events.push_back({t_now, fsm.phase()});
      if (fsm.phase() == MissionPhase::Aborted) {
        traj.reset();  // hold position, stop moving
        desired.v.setZero();
        desired.a.setZero();
      }
    }

    if (dir.enable_admittance) {
      admittance.reset();
      admittance_enabled = true;
    }
    if (dir.estimate_bias) {
      bias_hist.clear();
      bias_collecting = true;
      bias_ready = false;
      bias_target_samples = static_cast<size_t>(
          std::llround(sc.mission.t_bias_window * sc.run.rates.observer));
    }
    if (dir.dispense_couplant) {
      const DispenseResult d = dispense_couplant(contact);
      contact = d.state;
      if (d.without_contact) {
        std::fprintf(stderr, "warning: couplant dispensed without contact\n");
      }
    }
    measurement_requested = dir.request_measurement;
    if (dir.waypoints) plan_leg(*dir.waypoints, dir.leg_limits, t_now);

    compliant = admittance_enabled ? admittance.step(est.output(), desired)
                                   : desired;
    if (hooks.on_planner) hooks.on_planner(t_now, desired, compliant, fsm.phase());
  }

  bool measurement_requested = false;

  RunResult run_loop() {
    const auto t_begin = std::chrono::steady_clock::now();
    const long long n_ticks =
        std::llround(sc.run.duration * sc.run.rates.physics);
    result.phase_events.push_back({0.0, fsm.phase()});
    log_row(0.0);

    for (long long k = 0; k < n_ticks; ++k) {
      // environment: probe-surface interaction at the current state
      const TipKinematics tip = probe_tip(state, sc.probe);
      const ContactStepResult cres =
          contact_step(contact, tip, sc.surface, sc.probe, state.psi, dt);
      contact = cres.state;
      f_ext = cres.f_ext_on_vehicle + sc.run.aero_bias;

      // dynamics: inner-loop lags then translational step
      state = inner_loop(cmd, state, sc.vehicle, dt);
      state = step_dynamics(state, f_ext, sc.vehicle, dt);

      // sensors
      readings = sense(state, f_ext, sc.noise, sc.vehicle, rng);

      const long long tick = k + 1;
      const double t_now = static_cast<double>(tick) * dt;

      if (tick % obs_div == 0) {
        est = observer_update(est, readings.imu_accel_body, readings.odom_q,
                              readings.rotor_speeds_meas, sc.vehicle,
                              sc.observer, dt * obs_div);
        if (bias_collecting) {
          bias_hist.push_back(est.f_hat_filtered);
          if (bias_hist.size() >= bias_target_samples) {
            est.bias = estimate_bias(bias_hist);
            bias_collecting = false;
            bias_ready = true;
          }
        }
        if (hooks.on_observer) hooks.on_observer(t_now, readings, est);
      }

      if (tick % meas_div == 0) {
        if (measurement_requested) {
          const TipKinematics now_tip = probe_tip(state, sc.probe);
          const Vec3 lat_v = now_tip.vel - sc.surface.normal *
                                               sc.surface.normal.dot(now_tip.vel);
          ut_reading = ut_sampler.sample(contact, lat_v.norm(), sc.surface,
                                         sc.ut, dt * meas_div, rng);
        } else {
          ut_sampler.reset();
          ut_reading = UTReading{};
        }
      }

      if (tick % plan_div == 0) planner_tick(t_now);

      if (tick % ctrl_div == 0) {
        const Vec3 a =
            accel_command(compliant, readings.odom_p, readings.odom_v,
                          est.output(), sc.gains, sc.vehicle.m);
        const double yr =
            yaw_rate_command(compliant.yaw, compliant.yaw_rate,
                             yaw_from_quat(readings.odom_q), sc.gains);
        cmd = AccelYawRateCmd::saturated(a, yr, sc.vehicle);
        if (hooks.on_control) hooks.on_control(t_now, cmd);
      }

      if (tick % log_div == 0) log_row(t_now);

      if (sc.run.stop_on_terminal && fsm.terminal()) break;
    }

    switch (fsm.phase()) {
      case MissionPhase::Done: result.outcome = RunOutcome::Success; break;
      case MissionPhase::Aborted: result.outcome = RunOutcome::Aborted; break;
      default: result.outcome = RunOutcome::Incomplete; break;
    }
    result.abort_reason = fsm.state().abort_reason;
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin)
            .count();
    return std::move(result);
  }

  void log_row(double t_now) {
    LogRow r;
    r.t = t_now;
    r.p = state.p;
    r.v = state.v;
    r.yaw = state.psi;
    r.ref_p = compliant.p;
    r.ref_v = compliant.v;
    r.des_p = desired.p;
    r.f_ext = f_ext;
    r.f_hat = est.f_hat;
    r.f_hat_filt = est.f_hat_filtered;
    r.f_hat_corr = est.output();
    r.rotor = readings.rotor_speeds_meas;
    r.phase = static_cast<int>(fsm.phase());
    r.attached = contact.attached ? 1 : 0;
    r.compression = contact.compression;
    r.interface_force = contact.interface_normal_force;
    r.ut_quality = static_cast<int>(ut_reading.quality);
    r.ut_thickness = ut_reading.thickness_mm;
    r.couplant_age = contact.couplant_age ? *contact.couplant_age : -1.0;
    result.log.rows.push_back(r);
  }
};

}  // namespace

RunResult run(const Scenario& scenario, const RunHooks& hooks) {
  scenario.validate();
  Engine engine(scenario, hooks);
  return engine.run_loop();
}

RunMetrics compute_metrics(const RunLog& log, bool require_contact) {
  if (log.rows.size() < 2) throw Error("log too short for metrics");
  const double dt = log.dt();
  RunMetrics m;

  // outcome from the final phase
  const int last_phase = log.rows.back().phase;
  if (last_phase == static_cast<int>(MissionPhase::Done)) {
    m.outcome = RunOutcome::Success;
  } else if (last_phase == static_cast<int>(MissionPhase::Aborted)) {
    m.outcome = RunOutcome::Aborted;
  }

  // tracking RMSE over the active mission span (Approach..Detach)
  Vec3 sq = Vec3::Zero();
  long n_active = 0;
  for (const LogRow& r : log.rows) {
    if (r.phase >= static_cast<int>(MissionPhase::ApproachInspection) &&
        r.phase <= static_cast<int>(MissionPhase::Detach)) {
      const Vec3 e = r.ref_p - r.p;
      sq += e.cwiseProduct(e);
      ++n_active;
    }
  }
  if (n_active > 0) m.rmse = (sq / static_cast<double>(n_active)).cwiseSqrt();

  bool any_contact = false;
  Vec2 yz_sum = Vec2::Zero();
  long n_contact = 0;
  double force_sum = 0.0;
  long n_good = 0;
  double th_sum = 0.0, th_sq = 0.0;
  long n_th = 0;
  std::ptrdiff_t detach_idx = -1;
  for (size_t i = 0; i < log.rows.size(); ++i) {
    const LogRow& r = log.rows[i];
    if (r.attached) {
      any_contact = true;
      yz_sum.x() += std::abs(r.des_p.y() - r.p.y());
      yz_sum.y() += std::abs(r.des_p.z() - r.p.z());
      ++n_contact;
    }
    if (i > 0 && log.rows[i - 1].attached && !r.attached) {
      detach_idx = static_cast<std::ptrdiff_t>(i);
    }
    if (r.ut_quality == 2) {
      force_sum += r.interface_force;
      ++n_good;
    }
    if (r.ut_quality != 0) {
      th_sum += r.ut_thickness;
      th_sq += r.ut_thickness * r.ut_thickness;
      ++n_th;
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (!any_contact) {
    if (require_contact) {
      throw NoContactPhase("mission never latched contact");
    }
    m.yz_contact_error = Vec2(nan, nan);
    m.steady_contact_force = nan;
    m.detach_recovery = nan;
    m.thickness_mean_mm = nan;
    m.thickness_std_mm = nan;
    return m;
  }

  m.yz_contact_error = yz_sum / static_cast<double>(n_contact);
  m.good_stable_duration = static_cast<double>(n_good) * dt;
  m.steady_contact_force =
      n_good > 0 ? force_sum / static_cast<double>(n_good) : nan;
  if (n_th > 0) {
    m.thickness_mean_mm = th_sum / static_cast<double>(n_th);
    const double var =
        std::max(0.0, th_sq / static_cast<double>(n_th) -
                          m.thickness_mean_mm * m.thickness_mean_mm);
    m.thickness_std_mm = std::sqrt(var);
  } else {
    m.thickness_mean_mm = nan;
    m.thickness_std_mm = nan;
  }

  if (detach_idx >= 0) {
    // time until the tracking error stays below 2 cm (5 s search window)
    const double t_det = log.rows[static_cast<size_t>(detach_idx)].t;
    double last_bad = t_det;
    bool any_bad = false;
    for (size_t i = static_cast<size_t>(detach_idx); i < log.rows.size(); ++i) {
      const LogRow& r = log.rows[i];
      if (r.t > t_det + 5.0) break;
      if ((r.ref_p - r.p).norm() >= 0.02) {
        last_bad = r.t;
        any_bad = true;
      }
    }
    m.detach_recovery = any_bad ? (last_bad + dt - t_det) : 0.0;
  } else {
    m.detach_recovery = nan;
  }
  return m;
}

std::string metrics_table(const RunMetrics& m) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-28s %.4f %.4f %.4f\n",
                "tracking RMSE x/y/z [m]:", m.rmse.x(), m.rmse.y(), m.rmse.z());
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-28s %.4f %.4f\n",
                "contact error y/z [m]:", m.yz_contact_error.x(),
                m.yz_contact_error.y());
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-28s %.3f\n",
                "steady contact force [N]:", m.steady_contact_force);
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-28s %.2f\n",
                "good/stable duration [s]:", m.good_stable_duration);
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-28s %.2f\n",
                "detach recovery [s]:", m.detach_recovery);
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-28s %.4f +- %.4f\n",
                "thickness [mm]:", m.thickness_mean_mm, m.thickness_std_mm);
  os << buf;
  os << "outcome:                     " << outcome_name(m.outcome) << "\n";
  return os.str();
}

std::string metrics_csv_header(bool with_seed) {
  std::string h;
  if (with_seed) h += "seed,";
  h +=
      "rmse_x,rmse_y,rmse_z,contact_err_y,contact_err_z,steady_force_n,"
      "good_stable_s,detach_recovery_s,thickness_mean_mm,thickness_std_mm,"
      "outcome";
  return h;
}

std::string metrics_csv_row(const RunMetrics& m, std::uint64_t seed,
                            bool with_seed) {
  std::ostringstream os;
  char buf[32];
  auto put = [&](double v, bool lead_comma = true) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    if (lead_comma) os << ',';
    os << buf;
  };
  if (with_seed) os << seed;
  put(m.rmse.x(), with_seed);
  put(m.rmse.y());
  put(m.rmse.z());
  put(m.yz_contact_error.x());
  put(m.yz_contact_error.y());
  put(m.steady_contact_force);
  put(m.good_stable_duration);
  put(m.detach_recovery);
  put(m.thickness_mean_mm);
  put(m.thickness_std_mm);
  os << ',' << outcome_name(m.outcome);
  return os.str();
}

std::vector<std::pair<std::string, double>> read_metrics_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open metrics file '" + path + "'");
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row)) {
    throw ConfigError("metrics file needs a header and one row");
  }
  std::vector<std::pair<std::string, double>> out;
  std::stringstream hs(header), rs(row);
  std::string name, val;
  while (std::getline(hs, name, ',')) {
    if (!std::getline(rs, val, ',')) {
      throw ConfigError("metrics row shorter than header");
    }
    if (name == "outcome") {
      double code = 2.0;
      for (int i = 0; i < 3; ++i) {
        if (val == outcome_name(static_cast<RunOutcome>(i))) code = i;
      }
      out.emplace_back(name, code);
    } else {
      char* end = nullptr;
      const double v = std::strtod(val.c_str(), &end);
      if (end == val.c_str()) {
        throw ConfigError("malformed metrics value for '" + name + "'");
      }
      out.emplace_back(name, v);
    }
  }
  return out;
}

}  // namespace ndtsim
