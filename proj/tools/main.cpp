// Command-line front end: run scenarios, run the thrust-coefficient
// identification experiment, and recompute/compare run metrics.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include "ndtsim/config.hpp"
#include "ndtsim/identification.hpp"
#include "ndtsim/scheduler.hpp"

namespace fs = std::filesystem;
using namespace ndtsim;

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitAborted = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
  std::string scenario_path;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<double> log_rate;
};

Scenario load_with_overrides(const CommonOpts& opts) {
  Scenario sc = load_scenario(opts.scenario_path);
  for (const std::string& o : opts.overrides) apply_override(sc, o);
  if (opts.seed) apply_override(sc, "run.seed=" + std::to_string(*opts.seed));
  if (opts.log_rate) {
    std::ostringstream os;
    os << "run.log_rate=" << *opts.log_rate;
    apply_override(sc, os.str());
  }
  return sc;
}

void print_timeline(const RunResult& res) {
  std::printf("phase timeline:\n");
  for (const PhaseEvent& e : res.phase_events) {
    std::printf("  t=%7.2f s  [%d] %s\n", e.t, static_cast<int>(e.phase),
                phase_name(e.phase));
  }
}

int cmd_run(const CommonOpts& opts, int repeat,
            const std::vector<double>& inspect) {
  Scenario sc = load_with_overrides(opts);
  if (!inspect.empty()) {
    if (inspect.size() != 6) {
      throw ConfigError("--inspect needs x,y,z,nx,ny,nz");
    }
    InspectionRequest req;
    req.point = Vec3(inspect[0], inspect[1], inspect[2]);
    req.normal = Vec3(inspect[3], inspect[4], inspect[5]);
    sc.request = req;
  }
  fs::create_directories(opts.out_dir);

  if (repeat <= 1) {
    const RunResult res = run(sc);
    res.log.write_csv_file((fs::path(opts.out_dir) / "log.csv").string());

    RunMetrics metrics = compute_metrics(res.log, /*require_contact=*/false);
    {
      std::ofstream mf(fs::path(opts.out_dir) / "metrics.csv");
      mf << metrics_csv_header(true) << "\n"
         << metrics_csv_row(metrics, sc.run.seed, true) << "\n";
    }
    std::ostringstream summary;
    summary << "scenario: " << opts.scenario_path << "\n"
            << "seed: " << sc.run.seed << "\n"
            << "outcome: " << outcome_name(res.outcome);
    if (!res.abort_reason.empty()) summary << " (" << res.abort_reason << ")";
    summary << "\n\neffective parameters (defaults where unset):\n";
    char pbuf[256];
    std::snprintf(pbuf, sizeof(pbuf),
                  "  vehicle: m = %g kg, c_f = %g N/(rad/s)^2\n"
                  "  admittance K = (%g, %g, %g) N/m\n"
                  "  mission: f_desired = %g N, approach_offset = %g m\n",
                  sc.vehicle.m, sc.vehicle.c_f, sc.admittance.K.x(),
                  sc.admittance.K.y(), sc.admittance.K.z(),
                  sc.mission.f_desired, sc.mission.approach_offset);
    summary << pbuf << "\n" << metrics_table(metrics);
    {
      std::ofstream sf(fs::path(opts.out_dir) / "summary.txt");
      sf << summary.str();
    }
    print_timeline(res);
    std::cout << summary.str();
    if (res.outcome == RunOutcome::Aborted) {
      std::cout << "mission aborted: " << res.abort_reason << "\n";
      return kExitAborted;
    }
    return kExitSuccess;
  }

  // batch mode: seeds seed..seed+N-1 in parallel workers, merged metrics
  std::vector<std::future<std::pair<RunMetrics, RunOutcome>>> jobs;
  for (int i = 0; i < repeat; ++i) {
    Scenario si = sc;
    si.run.seed = sc.run.seed + static_cast<std::uint64_t>(i);
    jobs.push_back(std::async(std::launch::async, [si] {
      const RunResult r = run(si);
      return std::make_pair(compute_metrics(r.log, false), r.outcome);
    }));
  }
  std::ofstream mf(fs::path(opts.out_dir) / "metrics.csv");
  mf << metrics_csv_header(true) << "\n";
  bool any_aborted = false;
  for (int i = 0; i < repeat; ++i) {
    auto [metrics, outcome] = jobs[static_cast<size_t>(i)].get();
    mf << metrics_csv_row(metrics, sc.run.seed + static_cast<std::uint64_t>(i),
                          true)
       << "\n";
    any_aborted |= outcome == RunOutcome::Aborted;
  }
  std::cout << "ran " << repeat << " seeds, metrics in "
            << (fs::path(opts.out_dir) / "metrics.csv").string() << "\n";
  return any_aborted ? kExitAborted : kExitSuccess;
}

int cmd_identify(const CommonOpts& opts, const std::vector<double>& masses,
                 double duration) {
  Scenario sc = load_with_overrides(opts);
  fs::create_directories(opts.out_dir);

  IdExperimentConfig cfg;
  cfg.masses = masses;
  cfg.hover_duration = duration;
  const std::vector<IdPoint> data = identification_experiment(sc, cfg);
  write_id_dataset_csv(data, (fs::path(opts.out_dir) / "id_dataset.csv").string());

  const IdResult fit = identify_cf(data, sc.vehicle);
  const double rel_err = std::abs(fit.c_f - sc.vehicle.c_f) / sc.vehicle.c_f;
  std::printf("thrust coefficient fit over %zu hover points\n", data.size());
  std::printf("  c_f estimate: %.9e N/(rad/s)^2\n", fit.c_f);
  std::printf("  c_f truth:    %.9e\n", sc.vehicle.c_f);
  std::printf("  relative error: %.3e\n", rel_err);
  std::printf("  residual RMS: %.3e N\n", fit.residual_rms);
  return kExitSuccess;
}

int cmd_metrics(const std::string& log_path, const std::string& baseline_path,
                double tol) {
  const RunLog log = RunLog::read_csv_file(log_path);
  const RunMetrics m = compute_metrics(log, /*require_contact=*/false);
  std::cout << metrics_table(m);
  std::cout << metrics_csv_header(false) << "\n"
            << metrics_csv_row(m, 0, false) << "\n";

  if (baseline_path.empty()) return kExitSuccess;

  const auto baseline = read_metrics_csv(baseline_path);
  const auto ours_csv = metrics_csv_row(m, 0, false);
  // index our values by header name for the delta report
  std::vector<std::pair<std::string, double>> ours;
  {
    std::stringstream hs(metrics_csv_header(false)), rs(ours_csv);
    std::string name, val;
    while (std::getline(hs, name, ',') && std::getline(rs, val, ',')) {
      if (name == "outcome") continue;
      ours.emplace_back(name, std::strtod(val.c_str(), nullptr));
    }
  }
  bool all_pass = true;
  std::printf("\ndelta vs baseline (tolerance %.4g):\n", tol);
  for (const auto& [name, base_val] : baseline) {
    if (name == "outcome" || name == "seed") continue;
    for (const auto& [oname, oval] : ours) {
      if (oname != name) continue;
      const double delta = oval - base_val;
      const bool pass = std::isfinite(delta) && std::abs(delta) <= tol;
      all_pass &= pass;
      std::printf("  %-20s ours=%11.4g base=%11.4g delta=%+11.4g  %s\n",
                  name.c_str(), oval, base_val, delta, pass ? "pass" : "FAIL");
    }
  }
  std::printf("baseline comparison: %s\n", all_pass ? "pass" : "FAIL");
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contact-based aerial NDT inspection simulator"};
  app.require_subcommand(1);

  CommonOpts opts;
  int repeat = 1;
  std::vector<double> inspect;
  std::vector<double> masses;
  double duration = 10.0;
  std::string log_path, baseline_path;
  double tol = 0.05;

  CLI::App* runc = app.add_subcommand("run", "Run a scenario");
  runc->add_option("scenario", opts.scenario_path, "Scenario TOML file")
      ->required();
  runc->add_option("--out", opts.out_dir, "Output directory");
  runc->add_option("--set", opts.overrides,
                   "Override, section.key=value (repeatable)");
  runc->add_option("--seed", opts.seed, "Seed override");
  runc->add_option("--repeat", repeat, "Run N consecutive seeds in parallel");
  runc->add_option("--log-rate", opts.log_rate, "Log decimation rate [Hz]");
  runc->add_option("--inspect", inspect,
                   "Inspection request x,y,z,nx,ny,nz")
      ->delimiter(',');

  CLI::App* idc = app.add_subcommand(
      "identify", "Hover ladder + least-squares thrust coefficient fit");
  idc->add_option("scenario", opts.scenario_path, "Scenario TOML file")
      ->required();
  idc->add_option("--out", opts.out_dir, "Output directory");
  idc->add_option("--set", opts.overrides, "Override (repeatable)");
  idc->add_option("--seed", opts.seed, "Seed override");
  idc->add_option("--masses", masses, "Test masses [kg]")->delimiter(',');
  idc->add_option("--duration", duration, "Hover duration per mass [s]");

  CLI::App* mc = app.add_subcommand("metrics", "Recompute metrics from a log");
  mc->add_option("log", log_path, "log.csv from a run")->required();
  mc->add_option("--baseline", baseline_path, "Baseline metrics CSV");
  mc->add_option("--tol", tol, "Absolute pass/fail tolerance for deltas");

  CLI11_PARSE(app, argc, argv);

  try {
    if (runc->parsed()) return cmd_run(opts, repeat, inspect);
    if (idc->parsed()) return cmd_identify(opts, masses, duration);
    if (mc->parsed()) return cmd_metrics(log_path, baseline_path, tol);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}
