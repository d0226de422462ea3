#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ndtsim/types.hpp"

namespace ndtsim {

/// One telemetry row. Columns are SI units, printed with 9 significant
/// digits; couplant_age is -1 while no couplant is present.
struct LogRow {
  double t = 0.0;
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  double yaw = 0.0;
  Vec3 ref_p = Vec3::Zero();  // compliant reference
  Vec3 ref_v = Vec3::Zero();
  Vec3 des_p = Vec3::Zero();  // nominal desired
  Vec3 f_ext = Vec3::Zero();  // true external force
  Vec3 f_hat = Vec3::Zero();
  Vec3 f_hat_filt = Vec3::Zero();
  Vec3 f_hat_corr = Vec3::Zero();
  Vec4 rotor = Vec4::Zero();  // measured rotor speeds
  int phase = 1;
  int attached = 0;
  double compression = 0.0;
  double interface_force = 0.0;
  int ut_quality = 0;
  double ut_thickness = 0.0;
  double couplant_age = -1.0;
};

struct RunLog {
  std::vector<LogRow> rows;

  static const std::vector<std::string>& columns();
  void write_csv(std::ostream& out) const;
  void write_csv_file(const std::string& path) const;
  /// Throws ConfigError on a header/schema mismatch or truncated rows.
  static RunLog read_csv_file(const std::string& path);

  /// Log sample spacing, from the first two rows.
  double dt() const;
};

}  // namespace ndtsim
