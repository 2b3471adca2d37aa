#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "socialsim/orchestrator.hpp"

namespace socialsim {

/// Command-line values that take precedence over the config file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> backend;
  std::optional<double> t_k;
  std::optional<double> t_p;
  std::optional<int> n_initial;
  std::optional<int> n_regular;
  std::optional<int> stage_hours;
  std::optional<std::filesystem::path> fixtures;
  std::optional<std::filesystem::path> record_fixtures;
};

/// Keys accepted in a config document.
const std::vector<std::string_view>& config_keys();

std::size_t edit_distance(std::string_view a, std::string_view b);
/// Closest known key within edit distance 2, if any.
std::optional<std::string_view> suggest_key(std::string_view unknown);

/// Applies a config document over the defaults. Relative paths resolve
/// against `base_dir`. Throws ConfigError naming the offending key.
SimConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// File values, then overrides, then validation (including that every
/// referenced input path exists). An empty file yields the defaults.
SimConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Applies overrides and validates.
void apply_overrides(SimConfig& config, const ConfigOverrides& overrides);
void check_paths(const SimConfig& config);

}  // namespace socialsim
