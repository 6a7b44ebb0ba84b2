#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ehrelay {

/// Command-line entry point. Subcommands: analytic, simulate, validate,
/// sweep, optimize, figures. JSON results go to `out`, CSV tables to --out
/// (or `out` when --out is absent), diagnostics to `err`.
/// Returns 0 on success, 1 on a numeric or validation failure, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv);

}  // namespace ehrelay
