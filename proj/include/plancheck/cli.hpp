#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace plancheck {

/// Process exit codes of the `plancheck` binary.
enum ExitStatus : int {
  kExitOk = 0,           // spec holds, plan valid, or plain success
  kExitViolated = 1,     // counterexample found, plan invalid
  kExitUnknown = 2,      // parse failure or bound exhausted
  kExitUsage = 3,        // bad arguments, unreadable input, schema errors
  kExitProvider = 4,     // completion provider failure
};

extern const char* const kVersion;

/// Runs the command line `args` (without the program name). Results go to
/// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace plancheck
