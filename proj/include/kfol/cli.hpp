#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kfol {

/// Runs one `kfol` subcommand. `args` excludes the program name. Returns the
/// process exit code: 0 success, 1 runtime failure, 2 validation failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kfol
