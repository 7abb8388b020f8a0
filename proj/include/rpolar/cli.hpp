#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rpolar/error.hpp"

namespace rpolar {

// Process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;  // verify FAIL and uncategorised errors
inline constexpr int exit_parse = 2;
inline constexpr int exit_degenerate = 3;
inline constexpr int exit_too_large = 4;
inline constexpr int exit_not_symmetric_square = 5;
inline constexpr int exit_infeasible_label = 6;

int exit_code_for(ErrorCode code);

/// Runs one command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rpolar
