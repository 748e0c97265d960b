#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbe/evolution.hpp"
#include "fbe/galerkin.hpp"

namespace fbe {

struct GalerkinConfig {
  int m = 16;
  double dt = 0.005;
  double T = 0.2;
};

/// Settings of the lab subcommands; the run part doubles as their data.
struct LabConfig {
  std::vector<double> kappas{0.1, 0.05, 0.025};
  GalerkinConfig galerkin;
  PicardOptions picard;
  int agu_cases = 24;
  int agu_points = 3;
};

struct Config {
  RunConfig run;
  LabConfig lab;
};

/// Validated config with defaults filled. Unknown keys are rejected.
/// Throws ConfigError naming the offending field.
Config parse_config(const nlohmann::json& j);
Config parse_config_file(const std::string& path);

/// Same document back, defaults included.
nlohmann::json to_json(const Config& c);

}  // namespace fbe
