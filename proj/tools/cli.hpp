#pragma once

#include <iosfwd>

#include "wepadim/error.hpp"

namespace wepadim::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitCompatibility = 3,
  kExitNumerical = 4,
};

int exit_code(ErrorKind kind) noexcept;

/// Entry point shared by the executable and the tests. Returns the
/// process exit code; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wepadim::cli
