#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dgdtrack {

/// Process exit codes of the dgdtrack tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  kExitConfig = 2,
  kExitTheoryDegeneracy = 3,
};

/// Entry point behind the `dgdtrack` binary; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dgdtrack
