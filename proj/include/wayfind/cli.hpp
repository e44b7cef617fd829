#pragma once

#include <string>
#include <vector>

namespace wayfind {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  exit_ok = 0,
  exit_validation = 1,
  exit_io = 2,
  exit_usage = 64,
};

/// `wayfind validate|run|audit --scenario PATH [--out DIR] [overrides]`.
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace wayfind
