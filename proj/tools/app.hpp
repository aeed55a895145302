#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sstokes::cli {

/// Exit codes of the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitConfig = 2;

/// Full driver: parses arguments, runs the subcommand, reports failures as one line on `err`.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sstokes::cli
