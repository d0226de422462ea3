#pragma once

#include <string>

#include "ndtsim/scenario.hpp"

namespace ndtsim {

/// Loads a scenario from a TOML file. Unknown sections or keys, type
/// mismatches, and syntax problems raise ConfigError with the source line.
/// Missing keys keep their documented defaults.
Scenario load_scenario(const std::string& path);

/// Same, from in-memory text (tests, embedded defaults).
Scenario parse_scenario(const std::string& text);

/// Applies one "section.key=value" override on top of a loaded scenario.
void apply_override(Scenario& scenario, const std::string& assignment);

}  // namespace ndtsim
