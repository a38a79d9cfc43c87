#pragma once

#include <string>
#include <vector>

namespace shearhopf {

// Exit codes of run_command.
enum ExitCode { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitConsistency = 3 };

// Runs one subcommand (spectrum, neutral, hopf, simulate, regions, verify).
// args excludes the program name.
int run_command(const std::vector<std::string>& args);

}  // namespace shearhopf
