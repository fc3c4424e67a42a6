#pragma once

#include <iosfwd>

namespace sublin::cli {

/// Parses argv, runs one command and returns the process exit code:
/// 0 success, 1 usage, 2 invalid model, 3 numerical failure, 4 model too large.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sublin::cli
