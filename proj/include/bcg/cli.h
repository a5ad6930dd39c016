// Command-line front end. The `bcg` executable forwards to run_cli.
#ifndef BCG_CLI_H_
#define BCG_CLI_H_

#include <iosfwd>

namespace bcg {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitParse = 3,
  kExitBudget = 4,
  kExitNumeric = 5,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bcg

#endif  // BCG_CLI_H_
