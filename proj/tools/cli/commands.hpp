#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sotm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitInternalError = 2;

/// Runs the `sotm` command line. `args` excludes the program name.
/// Returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sotm::cli
