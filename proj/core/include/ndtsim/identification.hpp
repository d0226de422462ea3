#pragma once

#include <string>
#include <vector>

#include "ndtsim/observer.hpp"
#include "ndtsim/scenario.hpp"

namespace ndtsim {

struct IdExperimentConfig {
  std::vector<double> masses;  // kg; empty -> base mass + {0, .1, .2, .3, .4}
  double hover_duration = 10.0;  // s per mass
  double discard = 2.0;          // s of transient dropped before averaging
};

/// Runs one hover per test mass and averages the measured rotor speeds and
/// attitude over the post-transient window, producing the dataset the
/// thrust-coefficient fit consumes.
std::vector<IdPoint> identification_experiment(const Scenario& base,
                                               const IdExperimentConfig& cfg);

/// Default mass ladder: base, base+0.1 .. base+0.4 kg.
std::vector<double> default_id_masses(double base_mass);

void write_id_dataset_csv(const std::vector<IdPoint>& data,
                          const std::string& path);

}  // namespace ndtsim
