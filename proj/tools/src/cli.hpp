#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace radaccum::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parses `args` (without the program name) and runs the sub-command.
/// Returns 0 on success, 1 on a runtime failure and 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace radaccum::cli
