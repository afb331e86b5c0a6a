#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "alp/errors.hpp"

namespace alp::cli {

enum ExitCode : int {
  kPass = 0,
  kViolation = 1,
  kParseError = 2,
  kUnsupported = 3,
  kMissingInput = 4,
  kInconclusive = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

/// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace alp::cli
