#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace roughmerton {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3, kExitIo = 4 };

struct ConfigKey {
  std::string key;
  std::string fallback;
  std::string help;
};

const std::vector<std::string>& cli_commands();

/// Every config key a subcommand reads, with its default.
std::vector<ConfigKey> command_keys(const std::string& command);

/// Runs the command line `args` (without the program name). Returns the
/// process exit code; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace roughmerton
