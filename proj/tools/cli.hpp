#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace actscan::cli {

// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBadInput = 3;
inline constexpr int kExitDimension = 4;
inline constexpr int kExitInvariant = 5;

// Runs one subcommand. args[0] is the program name. On failure writes a single
// line "error: <category>: <message>" to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace actscan::cli
