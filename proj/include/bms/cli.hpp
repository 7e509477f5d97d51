#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace bms {

/// Runs the command-line front end on `args` (without the program name).
/// Returns 0 on success, 1 on a model or validation error and 2 on a
/// configuration or usage error. Errors are written to `err` as one JSON line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bms
