#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kerrpur {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point behind the `kerrpur` executable. `args` excludes the program name.
/// Subcommands: verify-branches, stage1, stage2, sweep.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kerrpur
