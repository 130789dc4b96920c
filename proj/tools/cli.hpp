#pragma once

#include <string>
#include <vector>

namespace perfwatt::cli {

/// Dispatches one command line. Returns 0 on success, 1 on usage or
/// configuration errors, 2 on runtime failures.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace perfwatt::cli
