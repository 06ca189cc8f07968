#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tricloud::cli {

enum ExitCode : int { kOk = 0, kDataError = 1, kUsageError = 2 };

// Entry point of the `tricloud` tool. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tricloud::cli
