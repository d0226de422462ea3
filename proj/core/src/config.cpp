#include "ndtsim/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>
#include <vector>

#include "ndtsim/errors.hpp"

namespace ndtsim {

void Rates::validate() const {
  for (double r : {physics, control, observer, planner, measurement, log}) {
    if (!(r > 0.0)) throw ConfigError("run rates must be > 0");
  }
  for (double r : {control, observer, planner, measurement, log}) {
    const double ratio = physics / r;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0) {
      throw ConfigError("run.physics_rate must be an integer multiple of every other rate");
    }
  }
}

int Rates::divisor(double rate) const {
  return static_cast<int>(std::llround(physics / rate));
}

InspectionRequest Scenario::effective_request() const {
  if (request) return *request;
  InspectionRequest r;
  r.point = surface.point;
  r.normal = surface.normal;
  return r;
}

void Scenario::validate() const {
  vehicle.validate();
  surface.validate();
  probe.validate();
  ut.validate();
  observer.validate(1.0 / run.rates.observer);
  admittance.validate();
  gains.validate();
  mission.validate();
  limits.validate();
  run.rates.validate();
  if (!(run.duration > 0.0)) throw ConfigError("run.duration must be > 0");
  if (mission.t_bias_window * run.rates.observer < 10.0) {
    throw ConfigError(
        "mission.t_bias_window must cover at least 10 observer samples");
  }
  if (autostart) {
    // catch unusable inspection poses at load time instead of mid-run
    const InspectionRequest req = effective_request();
    if (std::abs(req.normal.norm() - 1.0) > 1e-6) {
      throw ConfigError("mission.inspection_normal must be a unit vector");
    }
    if (req.normal.head<2>().norm() < 1e-6) {
      throw ConfigError(
          "mission.inspection_normal is vertical; the probe is body-mounted");
    }
    if (!finite(req.point)) {
      throw ConfigError("mission.inspection_point must be finite");
    }
  }
}

// --- Minimal TOML subset ----------------------------------------------------
// Supported grammar: [section] headers, key = value lines, # comments, and
// values that are booleans, numbers, double-quoted strings, or single-line
// numeric arrays. That covers the whole scenario schema.

namespace {

struct TomlValue {
  std::variant<bool, double, std::string, std::vector<double>> v;
  int line = -1;
};

using TomlSection = std::map<std::string, TomlValue>;
using TomlTable = std::map<std::string, TomlSection>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& tok, int line) {
  const std::string t = trim(tok);
  if (t.empty()) throw ConfigError("expected a number", line);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) {
    throw ConfigError("malformed number '" + t + "'", line);
  }
  return v;
}

TomlValue parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  TomlValue out;
  out.line = line;
  if (s.empty()) throw ConfigError("missing value", line);
  if (s == "true") {
    out.v = true;
  } else if (s == "false") {
    out.v = false;
  } else if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') {
      throw ConfigError("unterminated string", line);
    }
    out.v = s.substr(1, s.size() - 2);
  } else if (s.front() == '[') {
    if (s.back() != ']') throw ConfigError("unterminated array", line);
    std::vector<double> arr;
    std::string body = s.substr(1, s.size() - 2);
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (trim(tok).empty() && ss.eof() && arr.empty()) break;  // []
      arr.push_back(parse_number(tok, line));
    }
    out.v = std::move(arr);
  } else {
    out.v = parse_number(s, line);
  }
  return out;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

TomlTable parse_toml(std::istream& in) {
  TomlTable table;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", lineno);
      section = trim(s.substr(1, s.size() - 2));
      if (!valid_key(section)) {
        throw ConfigError("bad section name '" + section + "'", lineno);
      }
      table[section];  // empty sections are fine
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected 'key = value'", lineno);
    }
    const std::string key = trim(s.substr(0, eq));
    if (!valid_key(key)) throw ConfigError("bad key '" + key + "'", lineno);
    if (section.empty()) {
      throw ConfigError("key '" + key + "' outside any [section]", lineno);
    }
    if (table[section].count(key)) {
      throw ConfigError("duplicate key '" + section + "." + key + "'", lineno);
    }
    table[section][key] = parse_value(s.substr(eq + 1), lineno);
  }
  return table;
}

// Typed binder: applies present keys onto the scenario and tracks what was
// consumed so unknown keys can be reported with their line.
class Binder {
 public:
  explicit Binder(const TomlTable& table) : table_(table) {}

  void bind(Scenario& sc) {
    auto& v = sc.vehicle;
    num("vehicle", "m", v.m);
    num("vehicle", "c_f", v.c_f);
    num("vehicle", "tau_att", v.tau_att);
    num("vehicle", "tau_thrust", v.tau_thrust);
    num("vehicle", "omega_max", v.omega_max);
    num("vehicle", "accel_cmd_max", v.accel_cmd_max);
    num("vehicle", "f_min", v.f_min);
    for (int i = 0; i < 4; ++i) {
      vec3("vehicle", "z_p" + std::to_string(i + 1),
           v.rotor_axes[static_cast<size_t>(i)]);
    }

    auto& n = sc.noise;
    num("noise", "odom_pos_sigma", n.odom_pos_sigma);
    num("noise", "odom_vel_sigma", n.odom_vel_sigma);
    num("noise", "odom_yaw_sigma", n.odom_yaw_sigma);
    num("noise", "imu_accel_sigma", n.imu_accel_sigma);
    num("noise", "rotor_speed_rel_sigma", n.rotor_speed_rel_sigma);

    auto& s = sc.surface;
    vec3("surface", "point", s.point);
    vec3("surface", "normal", s.normal);
    num("surface", "true_thickness_mm", s.true_thickness_mm);
    boolean("surface", "ferromagnetic", s.ferromagnetic);

    auto& p = sc.probe;
    vec3("probe", "offset_body", p.offset_body);
    vec3("probe", "axis_body", p.axis_body);
    num("probe", "k_spring", p.k_spring);
    num("probe", "d_spring", p.d_spring);
    num("probe", "z_coupling", p.z_coupling);
    num("probe", "f_adhesion", p.f_adhesion);
    num("probe", "f_breakaway_0", p.f_breakaway_0);
    num("probe", "yaw_release", p.yaw_release);
    num("probe", "capture_dist", p.capture_dist);
    num("probe", "hood_pull_speed", p.hood_pull_speed);
    num("probe", "damp_ref_depth", p.damp_ref_depth);
    // UT quality model keys live with the probe that carries the sensor.
    auto& u = sc.ut;
    num("probe", "f_lo", u.f_lo);
    num("probe", "f_hi", u.f_hi);
    num("probe", "v_slip_max", u.v_slip_max);
    num("probe", "t_stable", u.t_stable);
    num("probe", "sigma_ut_mm", u.sigma_ut_mm);
    num("probe", "t_couplant_life", u.t_couplant_life);

    diag("observer", "L", sc.observer.L);
    num("observer", "omega_c", sc.observer.omega_c);

    diag("admittance", "M", sc.admittance.M);
    diag("admittance", "D", sc.admittance.D);
    diag("admittance", "K", sc.admittance.K);

    diag("gains", "Kp", sc.gains.Kp);
    diag("gains", "Kv", sc.gains.Kv);
    num("gains", "K_psi", sc.gains.K_psi);

    auto& m = sc.mission;
    num("mission", "approach_offset", m.approach_offset);
    num("mission", "f_desired", m.f_desired);
    num("mission", "f_contact_threshold", m.f_contact_threshold);
    num("mission", "approach_speed", m.approach_speed);
    num("mission", "t_bias_window", m.t_bias_window);
    num("mission", "t_measurement_max", m.t_measurement_max);
    num("mission", "detach_yaw", m.detach_yaw);
    num("mission", "detach_back_offset", m.detach_back_offset);
    num("mission", "detach_lateral_offset", m.detach_lateral_offset);
    num("mission", "pose_gate", m.pose_gate);
    num("mission", "t_approach_max", m.t_approach_max);
    num("mission", "t_contact_max", m.t_contact_max);
    num("mission", "t_detach_max", m.t_detach_max);
    num("mission", "max_vel", sc.limits.max_vel);
    num("mission", "max_acc", sc.limits.max_acc);
    num("mission", "max_yaw_rate", sc.limits.max_yaw_rate);
    num("mission", "max_yaw_acc", sc.limits.max_yaw_acc);
    boolean("mission", "autostart", sc.autostart);
    num("mission", "t_start", sc.t_start);
    {
      InspectionRequest req = sc.effective_request();
      bool any = false;
      any |= vec3("mission", "inspection_point", req.point);
      any |= vec3("mission", "inspection_normal", req.normal);
      if (any) sc.request = req;
    }

    auto& r = sc.run;
    num("run", "duration", r.duration);
    uint64("run", "seed", r.seed);
    vec3("run", "start_position", r.start_position);
    num("run", "start_yaw", r.start_yaw);
    vec3("run", "aero_bias", r.aero_bias);
    num("run", "physics_rate", r.rates.physics);
    num("run", "control_rate", r.rates.control);
    num("run", "observer_rate", r.rates.observer);
    num("run", "planner_rate", r.rates.planner);
    num("run", "measurement_rate", r.rates.measurement);
    num("run", "log_rate", r.rates.log);
    boolean("run", "stop_on_terminal", r.stop_on_terminal);

    report_unknown();
  }

 private:
  const TomlValue* find(const std::string& sec, const std::string& key) {
    const auto si = table_.find(sec);
    if (si == table_.end()) return nullptr;
    const auto ki = si->second.find(key);
    if (ki == si->second.end()) return nullptr;
    consumed_.insert(sec + "." + key);
    return &ki->second;
  }

  bool num(const std::string& sec, const std::string& key, double& out) {
    const TomlValue* v = find(sec, key);
    if (!v) return false;
    if (const double* d = std::get_if<double>(&v->v)) {
      out = *d;
      return true;
    }
    throw ConfigError(sec + "." + key + " must be a number", v->line);
  }

  bool uint64(const std::string& sec, const std::string& key, std::uint64_t& out) {
    double d = 0.0;
    if (!num(sec, key, d)) return false;
    if (d < 0.0 || d != std::floor(d)) {
      throw ConfigError(sec + "." + key + " must be a non-negative integer");
    }
    out = static_cast<std::uint64_t>(d);
    return true;
  }

  bool boolean(const std::string& sec, const std::string& key, bool& out) {
    const TomlValue* v = find(sec, key);
    if (!v) return false;
    if (const bool* b = std::get_if<bool>(&v->v)) {
      out = *b;
      return true;
    }
    throw ConfigError(sec + "." + key + " must be true or false", v->line);
  }

  bool vec3(const std::string& sec, const std::string& key, Vec3& out) {
    const TomlValue* v = find(sec, key);
    if (!v) return false;
    const auto* arr = std::get_if<std::vector<double>>(&v->v);
    if (!arr || arr->size() != 3) {
      throw ConfigError(sec + "." + key + " must be an array of 3 numbers",
                        v->line);
    }
    out = Vec3((*arr)[0], (*arr)[1], (*arr)[2]);
    return true;
  }

  // Diagonal gains accept a scalar (uniform) or an array of 3.
  bool diag(const std::string& sec, const std::string& key, Vec3& out) {
    const TomlValue* v = find(sec, key);
    if (!v) return false;
    if (const double* d = std::get_if<double>(&v->v)) {
      out.setConstant(*d);
      return true;
    }
    const auto* arr = std::get_if<std::vector<double>>(&v->v);
    if (!arr || arr->size() != 3) {
      throw ConfigError(sec + "." + key + " must be a number or an array of 3",
                        v->line);
    }
    out = Vec3((*arr)[0], (*arr)[1], (*arr)[2]);
    return true;
  }

  void report_unknown() const {
    for (const auto& [sec, entries] : table_) {
      if (entries.empty() && !known_section(sec)) {
        throw ConfigError("unknown section [" + sec + "]");
      }
      for (const auto& [key, val] : entries) {
        if (!consumed_.count(sec + "." + key)) {
          throw ConfigError("unknown key '" + sec + "." + key + "'", val.line);
        }
      }
    }
  }

  static bool known_section(const std::string& s) {
    static const std::set<std::string> k = {"vehicle", "noise", "surface",
                                            "probe", "observer", "admittance",
                                            "gains", "mission", "run"};
    return k.count(s) > 0;
  }

  const TomlTable& table_;
  std::set<std::string> consumed_;
};

}  // namespace

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  Scenario sc;
  TomlTable table = parse_toml(in);
  Binder(table).bind(sc);
  sc.validate();
  return sc;
}

Scenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  Scenario sc;
  TomlTable table = parse_toml(in);
  Binder(table).bind(sc);
  sc.validate();
  return sc;
}

void apply_override(Scenario& scenario, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override must look like section.key=value: '" +
                      assignment + "'");
  }
  const std::string path = assignment.substr(0, eq);
  const auto dot = path.find('.');
  if (dot == std::string::npos) {
    throw ConfigError("override key must be section.key: '" + path + "'");
  }
  TomlTable table;
  table[path.substr(0, dot)][path.substr(dot + 1)] =
      parse_value(assignment.substr(eq + 1), -1);
  Binder(table).bind(scenario);
  scenario.validate();
}

}  // namespace ndtsim
