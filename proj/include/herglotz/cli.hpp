#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace herglotz {

// Exit codes of the command line front end.
enum ExitCode : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_input = 2,
  exit_numeric = 3,
  exit_not_converged = 4,
};

// args excludes the program name.  Summaries go to `out`; CSV goes to --out files, or to
// `out` when no file is given (the summary then moves to `err`).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace herglotz
