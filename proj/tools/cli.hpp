#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scenery {

/// Exit codes of the command-line tool.
enum ExitStatus : int {
    kExitOk = 0,
    kExitFailed = 1,  // validation or round-trip failure
    kExitUsage = 2,
    kExitIo = 3,      // I/O or format error
};

/// Runs the `scenery` tool; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scenery
