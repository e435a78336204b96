#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hiercon {

/// Runs one command line (args[0] is the program name). Failures print a
/// one-line JSON error record to `err` and return a nonzero status.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace hiercon
