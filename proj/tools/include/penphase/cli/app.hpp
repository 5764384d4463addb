#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace penphase::cli {

enum ExitCode : int {
  kOk = 0,
  kDomainError = 2,
  kNumericalError = 3,
  kNoCyclicStates = 4,
};

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace penphase::cli
