#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace yardsale {

enum ExitCode : int {
    kExitOk = 0,
    kExitRuntime = 1,
    kExitConfig = 2,
    kExitCheckFailed = 3,
};

/// Subcommands: simulate, ensemble, verify-increment, verify-summability,
/// win-prob, condense-times. Data go to files (or to `out` with --stdout);
/// diagnostics go to `err`. `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_main(int argc, const char* const* argv);

}  // namespace yardsale
