#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scylla {

enum ExitCode : int { kExitOk = 0, kExitInput = 1, kExitProvider = 2 };

// Entry point of the `scylla` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scylla
