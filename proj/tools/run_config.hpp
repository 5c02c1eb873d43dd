#pragma once

// JSON run configuration: per-command defaults, schema-checked merging of a
// config file and `key=value` overrides, and conversion to library settings.

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "ggln/network.hpp"

namespace ggln::cli {

using json = nlohmann::ordered_json;

/// A config document that does not match the command's schema. The message
/// starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fully populated default config for "regress", "bandit", "denoise" or "props".
json default_config(const std::string& command);

/// Copies `patch` into `base`. Every key must already exist in `base` and keep
/// its type (integers stay integers; floats accept any number; null slots take
/// a number or null). Nested objects merge recursively.
void merge_checked(json& base, const json& patch, const std::string& path = "");

/// Applies "a.b=value"; value is parsed as JSON, falling back to a string.
void apply_override(json& cfg, const std::string& assignment);

/// Reads the "network" section into a NetworkConfig; the input sizes are
/// left for the caller.
NetworkConfig network_from_json(const json& net);

}  // namespace ggln::cli
