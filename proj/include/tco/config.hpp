#pragma once

#include "tco/scenario.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tco {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a CLI run needs. Fields without a scenario counterpart pick
/// the single point used by `eval`, `optimize` and the fixed axes of sweeps.
struct RunConfig {
  ScenarioConfig scenario{};
  double noise_scale = 1.0;  // multiplies every noise sd

  std::int64_t point_n = 5000;
  double point_m = 10.0;
  double point_t = 10.0;

  std::int64_t sweep_time_n = 5000;
  double sweep_time_m = 10.0;
  double sweep_servers_t = 10.0;

  /// Perturbation spec after applying noise_scale.
  PerturbationSpec effective_spec() const;
  ScenarioConfig effective_scenario() const;
};

/// Ordered key -> raw value map from a `key = value` text file. Blank lines
/// and lines starting with '#' are skipped; duplicate keys are errors.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Builds a RunConfig from raw key/value pairs on top of the defaults.
/// table.* keys are applied first so that the coefficients derived from
/// device costs (y = 0.8x, e0 = e1 = 0.1x, y_instr = x_instr, sd = sqrt(x))
/// follow any table override unless set explicitly.
RunConfig build_config(const std::map<std::string, std::string>& kv);

RunConfig load_config_file(const std::string& path);

/// Every key with its effective value, one `key = value` per line, in a
/// fixed order. Feeding this back through build_config reproduces the run.
std::string dump_config(const RunConfig& config);

/// Formats a double with the shortest representation that round-trips.
std::string format_double(double v);

}  // namespace tco
