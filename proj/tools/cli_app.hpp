#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lightcone::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one command line (without the program name). Returns the exit code:
/// 0 success, 1 runtime or domain error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Splices the flags of a `--config file.json` document in front of the
/// command-line flags so that the latter win. Keys are long flag names.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace lightcone::cli
