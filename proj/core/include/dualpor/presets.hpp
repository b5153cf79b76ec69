#pragma once

// Named scenarios: the block experiments with their shared media data and
// boundary trajectories, and a reservoir water-flood for the effective
// system.

#include <string>
#include <vector>

#include "dualpor/config.hpp"

namespace dualpor {

/// sim1, strong-contrast, equal-Pc, nonmonotone.
std::vector<std::string> preset_names();
/// waterflood.
std::vector<std::string> effective_preset_names();

/// Throws ParameterError listing the known names for an unknown name.
ScenarioConfig preset(const std::string& name);
EffectiveScenario effective_preset(const std::string& name);

/// Delta values of the block presets.
std::vector<double> preset_deltas();

}  // namespace dualpor
