#pragma once

#include <ostream>

namespace rescueplan::cli {

// Stable exit codes; scripts depend on them.
enum ExitStatus : int {
  kSuccess = 0,
  kUnsolvable = 1,  // also: invalid plan
  kUsage = 2,       // usage or input error
  kExhausted = 3,   // planner budget tripped
};

// Entry point for `rescueplan <subcommand> ...`. Results go to `out`,
// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rescueplan::cli
