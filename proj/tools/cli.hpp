#pragma once

#include <iosfwd>

namespace cliquemat::cli {

enum ExitCode : int { ok = 0, parse_failure = 1, config_failure = 2, numerical_failure = 3 };

/// Runs one command line. Messages go to `out` and `err`; result files go to
/// --out-dir and are only written once the command has succeeded.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cliquemat::cli
