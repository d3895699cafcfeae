#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace drainage::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line; artifacts that go to "-" are written to `out`,
/// logs and the one-line error message to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace drainage::cli
