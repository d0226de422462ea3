#include "ndtsim/identification.hpp"

#include <cstdio>
#include <fstream>

#include "ndtsim/errors.hpp"
#include "ndtsim/scheduler.hpp"

namespace ndtsim {

std::vector<double> default_id_masses(double base_mass) {
  return {base_mass, base_mass + 0.1, base_mass + 0.2, base_mass + 0.3,
          base_mass + 0.4};
}

std::vector<IdPoint> identification_experiment(const Scenario& base,
                                               const IdExperimentConfig& cfg) {
  const std::vector<double> masses =
      cfg.masses.empty() ? default_id_masses(base.vehicle.m) : cfg.masses;
  if (!(cfg.hover_duration > cfg.discard)) {
    throw ConfigError("identification hover_duration must exceed the discard window");
  }

  std::vector<IdPoint> data;
  data.reserve(masses.size());
  for (size_t j = 0; j < masses.size(); ++j) {
    Scenario sc = base;
    sc.vehicle.m = masses[j];  // payload attached; hover reflects it
    sc.autostart = false;      // plain hover, no mission
    sc.run.duration = cfg.hover_duration;
    sc.run.seed = base.run.seed + j;
    sc.run.stop_on_terminal = false;

    Vec4 w_sum = Vec4::Zero();
    Eigen::Vector4d q_sum = Eigen::Vector4d::Zero();
    long n = 0;
    RunHooks hooks;
    hooks.on_observer = [&](double t, const SensorReadings& r,
                            const ForceEstimate&) {
      if (t <= cfg.discard) return;
      w_sum += r.rotor_speeds_meas;
      Eigen::Vector4d qc = r.odom_q.coeffs();
      if (qc.dot(q_sum) < 0.0) qc = -qc;  // hemisphere alignment
      q_sum += qc;
      ++n;
    };
    run(sc, hooks);
    if (n < 1) throw InsufficientSamples("identification window has no samples");

    IdPoint p;
    p.mass_kg = masses[j];
    p.mean_rotor_speeds = w_sum / static_cast<double>(n);
    Quat qm;
    qm.coeffs() = q_sum.normalized();
    p.mean_R = qm.toRotationMatrix();
    data.push_back(p);
  }
  return data;
}

void write_id_dataset_csv(const std::vector<IdPoint>& data,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset file '" + path + "'");
  out << "mass_kg,w1,w2,w3,w4,r11,r12,r13,r21,r22,r23,r31,r32,r33\n";
  char buf[32];
  for (const IdPoint& p : data) {
    std::vector<double> vals = {p.mass_kg, p.mean_rotor_speeds[0],
                                p.mean_rotor_speeds[1], p.mean_rotor_speeds[2],
                                p.mean_rotor_speeds[3]};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) vals.push_back(p.mean_R(r, c));
    }
    for (size_t i = 0; i < vals.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g", vals[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace ndtsim
