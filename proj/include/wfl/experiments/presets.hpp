#pragma once

#include <string>
#include <vector>

#include "wfl/experiments/config.hpp"
#include "wfl/presets_data.hpp"

namespace wfl::experiments {

/// Names of the built-in scenario configurations, sorted.
inline std::vector<std::string> list_presets() {
  std::vector<std::string> out;
  for (const auto& [name, _] : detail::kPresetTable) out.emplace_back(name);
  return out;
}

inline std::string preset_text(const std::string& name) {
  for (const auto& [n, text] : detail::kPresetTable)
    if (n == name) return std::string(text);
  throw InvalidArgument("unknown preset '" + name + "'");
}

inline ScenarioConfig load_preset(const std::string& name) { return parse_config(preset_text(name)); }

}  // namespace wfl::experiments
