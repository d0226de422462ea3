#include <benchmark/benchmark.h>

#include "ndtsim/identification.hpp"
#include "ndtsim/scheduler.hpp"
#include "ndtsim/trajectory.hpp"

using namespace ndtsim;

namespace {

void BM_StepDynamics(benchmark::State& state) {
  VehicleParams p;
  VehicleState s = VehicleState::hover(Vec3(0, 0, 1), 0.0, p);
  const Vec3 f(0.5, -0.2, 0.1);
  for (auto _ : state) {
    s = step_dynamics(s, f, p, 1e-3);
    benchmark::DoNotOptimize(s.p.x());
    s.t = 0.0;  // keep the state bounded
  }
}
BENCHMARK(BM_StepDynamics);

void BM_InnerLoop(benchmark::State& state) {
  VehicleParams p;
  VehicleState s = VehicleState::hover(Vec3(0, 0, 1), 0.0, p);
  const auto cmd = AccelYawRateCmd::saturated(Vec3(0.3, 0.1, kGravity), 0.2, p);
  for (auto _ : state) {
    s = inner_loop(cmd, s, p, 1e-3);
    benchmark::DoNotOptimize(s.rotor_speeds[0]);
  }
}
BENCHMARK(BM_InnerLoop);

void BM_ContactStep(benchmark::State& state) {
  const ProbeSpec probe;
  const SurfaceSpec surface;
  ContactState c;
  c.attached = true;
  c.hood_seated = true;
  TipKinematics tip;
  tip.pos = Vec3(1.501, 0.0, 1.0);
  tip.vel = Vec3(0.001, 0.0, 0.0);
  for (auto _ : state) {
    auto res = contact_step(c, tip, surface, probe, 0.0, 1e-3);
    benchmark::DoNotOptimize(res.f_ext_on_vehicle.x());
  }
}
BENCHMARK(BM_ContactStep);

void BM_ObserverUpdate(benchmark::State& state) {
  VehicleParams p;
  ObserverConfig cfg;
  ForceEstimate est;
  const Vec4 w = Vec4::Constant(p.hover_rotor_speed());
  const Vec3 imu = (rotor_force_body(w, p) + Vec3(1, 0, 0)) / p.m;
  for (auto _ : state) {
    est = observer_update(est, imu, Quat::Identity(), w, p, cfg, 0.01);
    benchmark::DoNotOptimize(est.f_hat.x());
  }
}
BENCHMARK(BM_ObserverUpdate);

void BM_AdmittanceStep(benchmark::State& state) {
  AdmittanceFilter filt(AdmittanceConfig{}, 0.02);
  const ReferenceSetpoint des;
  for (auto _ : state) {
    auto out = filt.step(Vec3(-2.0, 0.1, 0.3), des);
    benchmark::DoNotOptimize(out.p.x());
  }
}
BENCHMARK(BM_AdmittanceStep);

void BM_TrajectoryPlan(benchmark::State& state) {
  std::vector<Waypoint> wps;
  const int n = static_cast<int>(state.range(0));
  for (int i = 0; i < n; ++i) {
    Waypoint w;
    w.p = Vec3(0.5 * i, 0.2 * (i % 2), 1.0 + 0.1 * i);
    w.yaw = 0.2 * i;
    wps.push_back(w);
  }
  for (auto _ : state) {
    const auto traj = plan(wps, TrajectoryLimits{});
    benchmark::DoNotOptimize(traj.total_duration());
  }
}
BENCHMARK(BM_TrajectoryPlan)->Arg(2)->Arg(5)->Arg(10);

void BM_TrajectorySample(benchmark::State& state) {
  std::vector<Waypoint> wps(4);
  for (int i = 0; i < 4; ++i) {
    wps[static_cast<size_t>(i)].p = Vec3(0.4 * i, 0.1 * i, 1.0);
  }
  const auto traj = plan(wps, TrajectoryLimits{});
  double t = 0.0;
  for (auto _ : state) {
    t += 0.02;
    if (t > traj.total_duration()) t = 0.0;
    const auto s = traj.sample(t);
    benchmark::DoNotOptimize(s.p.x());
  }
}
BENCHMARK(BM_TrajectorySample);

void BM_FullMission(benchmark::State& state) {
  Scenario sc;
  sc.run.duration = 40.0;
  sc.run.stop_on_terminal = true;
  for (auto _ : state) {
    const auto res = run(sc);
    benchmark::DoNotOptimize(res.log.rows.size());
  }
}
BENCHMARK(BM_FullMission)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
