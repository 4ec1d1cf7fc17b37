#pragma once

#include <string>
#include <vector>

namespace attbound {

/// Command-line entry point shared by the installed binary and the tests.
/// Subcommands: simulate, estimate, check-convergence, monte-carlo.
/// Returns 0 on success, 1 on validation/usage errors, 2 on runtime filter
/// errors.
int cli_main(const std::vector<std::string>& args);

}  // namespace attbound
