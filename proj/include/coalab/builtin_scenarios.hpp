#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coalab/scenario.hpp"

namespace coalab {

/// Small bundled configs, each runnable in a couple of seconds.
const std::vector<ScenarioConfig>& builtin_scenarios();

std::optional<ScenarioConfig> find_builtin(const std::string& name);

}  // namespace coalab
