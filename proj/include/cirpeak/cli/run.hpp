#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cirpeak::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;    // usage, validation and parse errors
inline constexpr int kExitNumerical = 2;  // non-finite loss, unstable design, failed gradient check

/// Entry point for the `cirpeak` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cirpeak::cli
