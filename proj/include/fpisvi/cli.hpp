#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fpisvi {

inline constexpr int exit_ok = 0;
inline constexpr int exit_input_error = 1;
inline constexpr int exit_numerical_error = 2;

/// Entry point behind the fpisvi executable. args excludes the program name.
/// Subcommands: fit, simulate, compare, certify.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fpisvi
