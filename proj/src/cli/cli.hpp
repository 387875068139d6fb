#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. args excludes the program name. The report goes to
/// out, diagnostics and usage text to err.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tel::cli
