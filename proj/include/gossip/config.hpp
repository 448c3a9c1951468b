#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gossip/simulation.hpp"

namespace gossip {

// Named experiment setups matching the evaluated scenarios; every field
// remains overridable through the config document or CLI flags.
std::vector<std::string> preset_names();
SimConfig preset_config(const std::string& name);

// Applies the keys present in `doc` on top of `base`. Unknown keys raise
// ConfigError.
SimConfig apply_config_json(SimConfig base, const nlohmann::json& doc);

SimConfig load_config_file(const std::string& path, SimConfig base);

nlohmann::json config_to_json(const SimConfig& config);

}  // namespace gossip
