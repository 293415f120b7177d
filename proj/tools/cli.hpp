#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wickforge::cli {

enum ExitCode : int { ok = 0, property_failure = 1, usage_error = 2 };

/// Runs one command line (args[0] is the program name). Reports go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace wickforge::cli
