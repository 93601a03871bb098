#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace scsqkd::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kUsage = 1, kZeroRate = 2 };

/// Runs the command line `args` (program name excluded). Normal output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "on:60,off:60" into (enabled, seconds) segments. Throws
/// std::invalid_argument on malformed input.
std::vector<std::pair<bool, double>> parse_pattern(const std::string& pattern);

}  // namespace scsqkd::cli
