#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bmot::cli {

/// Runs one bmot invocation. `args` excludes the program name. Returns the
/// process exit code: 0 success, 1 input error, 2 solver failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bmot::cli
