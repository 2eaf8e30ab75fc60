#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace qtomo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCollision = 2;

const std::vector<std::string>& command_names();

struct CommandOutput {
  std::string text;
  int exit_code = kExitOk;
};

/// Runs one experiment and returns its report text. Throws on bad input.
CommandOutput run_command(const std::string& command, const ExperimentConfig& config);

/// run_command plus output handling: writes to config key "out" atomically,
/// or to `out` when unset. Errors go to `err` and yield kExitError.
int run_and_write(const std::string& command, const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace qtomo::cli
