#pragma once

#include <iosfwd>

namespace nestderiv::cli {

enum ExitCode : int {
    kSuccess = 0,
    kValidationFailure = 1,
    kConfigError = 2,
    kIoError = 3,
};

/// Entry point of the `nestderiv` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nestderiv::cli
