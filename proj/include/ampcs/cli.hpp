#pragma once

#include <iosfwd>

namespace ampcs::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kValidationFailure = 2,
  kIoError = 3,
};

/// Entry point of the `ampcs` tool. Subcommands: recover, phase-transition,
/// support-pt, nmse-sweep, validate-denoiser.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ampcs::cli
