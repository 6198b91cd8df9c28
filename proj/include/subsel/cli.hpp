#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace subsel {

/// Exit codes: 0 success, 2 invalid input or configuration, 3 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// `args` excludes the program name. Errors go to `err` as one JSON line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subsel
