#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace fbe {

enum class Subcommand { run, verify, galerkin, picard, kappa_study, norms };

enum ExitCode : int { exit_ok = 0, exit_breakdown = 2, exit_verification = 3, exit_config = 4 };

/// What the command line asked for. Flags override the config file.
struct CommandSpec {
  Subcommand sub = Subcommand::run;
  std::string config_path;  // empty: defaults on a 16x16x17 grid
  std::string output_dir;   // empty: config value, else the working directory
  std::optional<std::uint64_t> seed;
  std::string verify_target = "agu";
  std::optional<int> m;
  std::optional<int> n_max;
  std::optional<double> T;
};

struct DispatchResult {
  int exit_code = exit_ok;
  nlohmann::json record;  // summary on success, error record otherwise
};

/// Runs one subcommand. Human-readable output goes to `out`; every
/// exception is turned into an exit code and a JSON error record.
DispatchResult dispatch(const CommandSpec& cmd, std::ostream& out);

}  // namespace fbe
