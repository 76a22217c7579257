#pragma once

#include <iosfwd>

namespace mvp::cli {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidation = 2,
  kBlowup = 3,
  kVerificationFailed = 4,
};

/// Entry point shared by the executable and the tests. Subcommands:
/// frontier, simulate, region, verify, example.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mvp::cli
