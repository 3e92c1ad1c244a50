#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace aq::cli {

/// Parses `args` (without the program name), runs the command and returns the
/// process exit status. Diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aq::cli
