#include "ndtsim/log.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ndtsim/errors.hpp"

namespace ndtsim {

const std::vector<std::string>& RunLog::columns() {
  static const std::vector<std::string> cols = {
      "t",
      "px", "py", "pz",
      "vx", "vy", "vz",
      "yaw",
      "ref_px", "ref_py", "ref_pz",
      "ref_vx", "ref_vy", "ref_vz",
      "des_px", "des_py", "des_pz",
      "fext_x", "fext_y", "fext_z",
      "fhat_x", "fhat_y", "fhat_z",
      "fhat_filt_x", "fhat_filt_y", "fhat_filt_z",
      "fhat_corr_x", "fhat_corr_y", "fhat_corr_z",
      "w1", "w2", "w3", "w4",
      "phase", "attached", "compression", "interface_force",
      "ut_quality", "ut_thickness_mm", "couplant_age",
  };
  return cols;
}

namespace {

void row_values(const LogRow& r, std::vector<double>& out) {
  out.clear();
  out.insert(out.end(), {r.t,
                         r.p.x(), r.p.y(), r.p.z(),
                         r.v.x(), r.v.y(), r.v.z(),
                         r.yaw,
                         r.ref_p.x(), r.ref_p.y(), r.ref_p.z(),
                         r.ref_v.x(), r.ref_v.y(), r.ref_v.z(),
                         r.des_p.x(), r.des_p.y(), r.des_p.z(),
                         r.f_ext.x(), r.f_ext.y(), r.f_ext.z(),
                         r.f_hat.x(), r.f_hat.y(), r.f_hat.z(),
                         r.f_hat_filt.x(), r.f_hat_filt.y(), r.f_hat_filt.z(),
                         r.f_hat_corr.x(), r.f_hat_corr.y(), r.f_hat_corr.z(),
                         r.rotor[0], r.rotor[1], r.rotor[2], r.rotor[3],
                         static_cast<double>(r.phase),
                         static_cast<double>(r.attached),
                         r.compression, r.interface_force,
                         static_cast<double>(r.ut_quality),
                         r.ut_thickness, r.couplant_age});
}

LogRow row_from_values(const std::vector<double>& v) {
  LogRow r;
  size_t i = 0;
  auto next = [&] { return v[i++]; };
  r.t = next();
  for (int k = 0; k < 3; ++k) r.p[k] = next();
  for (int k = 0; k < 3; ++k) r.v[k] = next();
  r.yaw = next();
  for (int k = 0; k < 3; ++k) r.ref_p[k] = next();
  for (int k = 0; k < 3; ++k) r.ref_v[k] = next();
  for (int k = 0; k < 3; ++k) r.des_p[k] = next();
  for (int k = 0; k < 3; ++k) r.f_ext[k] = next();
  for (int k = 0; k < 3; ++k) r.f_hat[k] = next();
  for (int k = 0; k < 3; ++k) r.f_hat_filt[k] = next();
  for (int k = 0; k < 3; ++k) r.f_hat_corr[k] = next();
  for (int k = 0; k < 4; ++k) r.rotor[k] = next();
  r.phase = static_cast<int>(next());
  r.attached = static_cast<int>(next());
  r.compression = next();
  r.interface_force = next();
  r.ut_quality = static_cast<int>(next());
  r.ut_thickness = next();
  r.couplant_age = next();
  return r;
}

}  // namespace

void RunLog::write_csv(std::ostream& out) const {
  const auto& cols = columns();
  for (size_t i = 0; i < cols.size(); ++i) {
    out << (i ? "," : "") << cols[i];
  }
  out << "\n";
  std::vector<double> vals;
  char buf[32];
  for (const LogRow& r : rows) {
    row_values(r, vals);
    for (size_t i = 0; i < vals.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", vals[i]);
      if (i) out << ',';
      out << buf;
    }
    out << "\n";
  }
}

void RunLog::write_csv_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write log file '" + path + "'");
  write_csv(out);
}

RunLog RunLog::read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open log file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("log schema mismatch: empty file");

  const auto& cols = columns();
  {
    std::stringstream ss(line);
    std::string name;
    size_t i = 0;
    while (std::getline(ss, name, ',')) {
      if (i >= cols.size() || name != cols[i]) {
        throw ConfigError("log schema mismatch at column " + std::to_string(i + 1));
      }
      ++i;
    }
    if (i != cols.size()) throw ConfigError("log schema mismatch: missing columns");
  }

  RunLog log;
  int lineno = 1;
  std::vector<double> vals;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    vals.clear();
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      char* end = nullptr;
      vals.push_back(std::strtod(tok.c_str(), &end));
      if (end == tok.c_str()) {
        throw ConfigError("malformed log value", lineno);
      }
    }
    if (vals.size() != cols.size()) {
      throw ConfigError("truncated log row", lineno);
    }
    log.rows.push_back(row_from_values(vals));
  }
  return log;
}

double RunLog::dt() const {
  if (rows.size() < 2) throw Error("log has fewer than 2 rows");
  return rows[1].t - rows[0].t;
}

}  // namespace ndtsim
