#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fracest/mc.hpp"

namespace fracest {

using Params = std::map<std::string, std::string>;

std::vector<std::string> experiment_names();

/// Runs a registered experiment. `params` override the experiment's
/// defaults (reps and n included); unknown keys are rejected.
McReport run_experiment(const std::string& name, const Params& params, std::uint64_t seed, unsigned workers);

}  // namespace fracest
