#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fibcon::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kDisagree = 1;
inline constexpr int kBadInput = 2;
inline constexpr int kKernelRank = 3;
inline constexpr int kInconclusive = 4;

/// Runs one invocation; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fibcon::cli
