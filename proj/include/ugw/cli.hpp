#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ugw::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kInvalid = 2;
inline constexpr int kParseFailure = 3;
inline constexpr int kRefused = 4;

/// Runs the command line `args` (without the program name). Results go to
/// --out or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ugw::cli
