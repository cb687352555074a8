#pragma once

#include <iosfwd>

namespace l1trend {

/// Exit status of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

/// Entry point of the `l1trend` tool; `out` receives stdout-bound documents,
/// `err` diagnostics. Returns an ExitCode.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace l1trend
