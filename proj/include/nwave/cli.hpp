#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nwave {

enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_usage = 2, exit_abort = 3 };

/// Entry point of the nwave tool. Reports go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nwave
