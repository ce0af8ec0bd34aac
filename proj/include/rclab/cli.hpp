#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rclab {

/// Exit codes of the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one `rclab` subcommand (sample, estimate, verify, fit, extremal,
/// bound-series). args excludes the program name. Records go to --output when
/// given (appended), else to `out`; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rclab
