#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace elc {

/// Exit codes of the `elc` command.
enum ExitCode : int { kExitOk = 0, kExitAnalysisFailed = 1, kExitBadInput = 2 };

/// Entry point of the `elc` tool; args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elc
