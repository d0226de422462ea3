// End-to-end checks of the installed command-line surface. The binary path
// and the shipped nominal scenario come from the test environment.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string bin() {
  const char* b = std::getenv("NDTSIM_BIN");
  REQUIRE(b != nullptr);
  return b;
}

std::string scenario() {
  const char* s = std::getenv("NDTSIM_SCENARIO");
  REQUIRE(s != nullptr);
  return s;
}

int run_cmd(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run: nominal scenario exits 0 and writes the three outputs") {
  const fs::path out = fs::temp_directory_path() / "ndtsim_cli_run";
  fs::remove_all(out);
  const fs::path stdout_log = fs::temp_directory_path() / "ndtsim_cli_run.txt";
  const int rc = run_cmd(bin() + " run " + scenario() + " --out " + out.string() +
                         " --set run.duration=30 --set run.stop_on_terminal=true" +
                         " > " + stdout_log.string() + " 2>&1");
  CHECK(rc == 0);
  CHECK(fs::exists(out / "log.csv"));
  CHECK(fs::exists(out / "metrics.csv"));
  CHECK(fs::exists(out / "summary.txt"));
  CHECK(slurp(out / "summary.txt").find("outcome: success") != std::string::npos);
  // phase timeline mirrors the state numbering
  const std::string printed = slurp(stdout_log);
  CHECK(printed.find("phase timeline:") != std::string::npos);
  CHECK(printed.find("[6] Detach") != std::string::npos);
  CHECK(printed.find("[7] Done") != std::string::npos);
}

TEST_CASE("run: unreachable contact threshold aborts with exit 1") {
  const fs::path out = fs::temp_directory_path() / "ndtsim_cli_abort";
  fs::remove_all(out);
  const int rc = run_cmd(bin() + " run " + scenario() + " --out " + out.string() +
                         " --set mission.f_contact_threshold=100" +
                         " --set mission.t_contact_max=5" +
                         " --set run.duration=20 --set run.stop_on_terminal=true" +
                         " > " + (out.string() + ".log") + " 2>&1");
  CHECK(rc == 1);
  CHECK(slurp(out.string() + ".log").find("contact timeout") != std::string::npos);
}

TEST_CASE("run: malformed config exits 2 with a line diagnostic") {
  const fs::path bad = fs::temp_directory_path() / "ndtsim_bad.toml";
  {
    std::ofstream f(bad);
    f << "[vehicle]\nm == 2.5\n";
  }
  const fs::path log = fs::temp_directory_path() / "ndtsim_bad.log";
  const int rc = run_cmd(bin() + " run " + bad.string() + " > " + log.string() + " 2>&1");
  CHECK(rc == 2);
  CHECK(slurp(log).find("line 2") != std::string::npos);
}

TEST_CASE("metrics: recomputation matches the run's own metrics") {
  const fs::path out = fs::temp_directory_path() / "ndtsim_cli_metrics";
  fs::remove_all(out);
  REQUIRE(run_cmd(bin() + " run " + scenario() + " --out " + out.string() +
                  " --set run.duration=30 --set run.stop_on_terminal=true" +
                  " > /dev/null 2>&1") == 0);
  const fs::path mlog = out / "metrics_recomputed.txt";
  const int rc =
      run_cmd(bin() + " metrics " + (out / "log.csv").string() + " > " +
              mlog.string() + " 2>&1");
  CHECK(rc == 0);

  // the run's own metrics row, minus the seed column
  std::string row = slurp(out / "metrics.csv");
  row = row.substr(row.find('\n') + 1);
  row = row.substr(row.find(',') + 1);
  // the recomputed row is the line after the repeated header
  const std::string rep = slurp(mlog);
  const auto hdr = rep.find("rmse_x,");
  REQUIRE(hdr != std::string::npos);
  std::string row2 = rep.substr(rep.find('\n', hdr) + 1);

  // identical up to the 9-significant-digit log round trip
  std::stringstream a(row), b(row2);
  std::string ta, tb;
  int fields = 0;
  while (std::getline(a, ta, ',') && std::getline(b, tb, ',')) {
    char* ea = nullptr;
    char* eb = nullptr;
    const double va = std::strtod(ta.c_str(), &ea);
    const double vb = std::strtod(tb.c_str(), &eb);
    if (ea != ta.c_str() && eb != tb.c_str()) {
      CHECK(vb == doctest::Approx(va).epsilon(1e-6).scale(1e-9));
    } else {
      CHECK(ta.find("success") == tb.find("success"));
    }
    ++fields;
  }
  CHECK(fields == 11);
}

TEST_CASE("metrics: truncated log exits 2") {
  const fs::path out = fs::temp_directory_path() / "ndtsim_cli_trunc";
  fs::remove_all(out);
  REQUIRE(run_cmd(bin() + " run " + scenario() + " --out " + out.string() +
                  " --set run.duration=5 > /dev/null 2>&1") == 0);
  // chop a row in half
  const std::string full = slurp(out / "log.csv");
  {
    std::ofstream f(out / "log_trunc.csv");
    f << full.substr(0, full.size() * 2 / 3);
    f << "\n";
  }
  const int rc = run_cmd(bin() + " metrics " + (out / "log_trunc.csv").string() +
                         " > /dev/null 2>&1");
  CHECK(rc == 2);
}

TEST_CASE("metrics: baseline comparison prints deltas") {
  const fs::path out = fs::temp_directory_path() / "ndtsim_cli_base";
  fs::remove_all(out);
  REQUIRE(run_cmd(bin() + " run " + scenario() + " --out " + out.string() +
                  " --set run.duration=30 --set run.stop_on_terminal=true" +
                  " > /dev/null 2>&1") == 0);
  // encode reference tracking errors as a baseline
  const fs::path base = out / "baseline.csv";
  {
    std::ofstream f(base);
    f << "rmse_x,rmse_y,rmse_z\n0.030,0.026,0.051\n";
  }
  const fs::path rep = out / "delta.txt";
  const int rc = run_cmd(bin() + " metrics " + (out / "log.csv").string() +
                         " --baseline " + base.string() + " --tol 0.06 > " +
                         rep.string() + " 2>&1");
  CHECK(rc == 0);
  const std::string report = slurp(rep);
  CHECK(report.find("rmse_x") != std::string::npos);
  CHECK(report.find("delta") != std::string::npos);
}

TEST_CASE("identify: noiseless run recovers c_f to 1e-10") {
  const fs::path out = fs::temp_directory_path() / "ndtsim_cli_id";
  fs::remove_all(out);
  const fs::path rep = fs::temp_directory_path() / "ndtsim_cli_id.txt";
  const int rc = run_cmd(
      bin() + " identify " + scenario() + " --out " + out.string() +
      " --duration 4 --set noise.odom_pos_sigma=0 --set noise.odom_vel_sigma=0" +
      " --set noise.imu_accel_sigma=0 --set noise.rotor_speed_rel_sigma=0" +
      " --set noise.odom_yaw_sigma=0 > " + rep.string() + " 2>&1");
  CHECK(rc == 0);
  CHECK(fs::exists(out / "id_dataset.csv"));
  const std::string report = slurp(rep);
  const auto pos = report.find("relative error: ");
  REQUIRE(pos != std::string::npos);
  const double rel = std::strtod(report.c_str() + pos + 16, nullptr);
  CHECK(rel < 1e-10);
}

TEST_CASE("run: summary notes the effective (defaulted) parameters") {
  const fs::path sparse = fs::temp_directory_path() / "ndtsim_sparse.toml";
  {
    std::ofstream f(sparse);
    f << "[run]\nduration = 3.0\n[mission]\nautostart = false\n";
  }
  const fs::path out = fs::temp_directory_path() / "ndtsim_cli_sparse";
  fs::remove_all(out);
  const int rc = run_cmd(bin() + " run " + sparse.string() + " --out " +
                         out.string() + " > /dev/null 2>&1");
  CHECK(rc == 0);
  const std::string summary = slurp(out / "summary.txt");
  CHECK(summary.find("m = 2.3 kg") != std::string::npos);
}

TEST_CASE("run: --repeat merges one metrics row per seed") {
  const fs::path out = fs::temp_directory_path() / "ndtsim_cli_repeat";
  fs::remove_all(out);
  const int rc = run_cmd(bin() + " run " + scenario() + " --out " + out.string() +
                         " --repeat 3 --seed 11" +
                         " --set run.duration=25 --set run.stop_on_terminal=true" +
                         " > /dev/null 2>&1");
  CHECK(rc == 0);
  std::ifstream mf(out / "metrics.csv");
  std::string line;
  std::getline(mf, line);
  CHECK(line.rfind("seed,", 0) == 0);
  std::vector<std::string> rows;
  while (std::getline(mf, line)) {
    if (!line.empty()) rows.push_back(line);
  }
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].rfind("11,", 0) == 0);
  CHECK(rows[2].rfind("13,", 0) == 0);
}

TEST_CASE("run: inspection request from the command line") {
  const fs::path out = fs::temp_directory_path() / "ndtsim_cli_inspect";
  fs::remove_all(out);
  const int rc = run_cmd(bin() + " run " + scenario() + " --out " + out.string() +
                         " --inspect 1.5,0,1,-1,0,0" +
                         " --set mission.autostart=true" +
                         " --set run.duration=30 --set run.stop_on_terminal=true" +
                         " > /dev/null 2>&1");
  CHECK(rc == 0);
  CHECK(slurp(out / "summary.txt").find("outcome: success") != std::string::npos);
}

TEST_CASE("run: shipped scenario variants behave as documented") {
  const fs::path dir = fs::path(scenario()).parent_path();

  SUBCASE("confined-space bias still completes") {
    const fs::path out = fs::temp_directory_path() / "ndtsim_cli_bias";
    fs::remove_all(out);
    const int rc = run_cmd(bin() + " run " + (dir / "confined_bias.toml").string() +
                           " --out " + out.string() +
                           " --set run.stop_on_terminal=true > /dev/null 2>&1");
    CHECK(rc == 0);
    CHECK(slurp(out / "summary.txt").find("outcome: success") != std::string::npos);
  }

  SUBCASE("non-ferromagnetic surface aborts on measurement timeout") {
    const fs::path out = fs::temp_directory_path() / "ndtsim_cli_nonferro";
    fs::remove_all(out);
    const fs::path log = fs::temp_directory_path() / "ndtsim_cli_nonferro.log";
    const int rc = run_cmd(bin() + " run " +
                           (dir / "nonferromagnetic.toml").string() + " --out " +
                           out.string() + " > " + log.string() + " 2>&1");
    CHECK(rc == 1);
    CHECK(slurp(log).find("measurement timeout") != std::string::npos);
  }
}

TEST_CASE("run: determinism across seeds flag") {
  const fs::path a = fs::temp_directory_path() / "ndtsim_det_a";
  const fs::path b = fs::temp_directory_path() / "ndtsim_det_b";
  fs::remove_all(a);
  fs::remove_all(b);
  REQUIRE(run_cmd(bin() + " run " + scenario() + " --out " + a.string() +
                  " --seed 5 --set run.duration=10 > /dev/null 2>&1") == 0);
  REQUIRE(run_cmd(bin() + " run " + scenario() + " --out " + b.string() +
                  " --seed 5 --set run.duration=10 > /dev/null 2>&1") == 0);
  CHECK(slurp(a / "log.csv") == slurp(b / "log.csv"));
}
