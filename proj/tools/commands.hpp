#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "config.hpp"

namespace dampwave::cli {

enum ExitCode { ok = 0, config_error = 1, numerical_failure = 2, acceptance_failure = 3 };

struct RunOptions {
  std::filesystem::path out = "out";
  std::uint64_t seed = 1;
  int threads = 1;
};

// Runs one subcommand into opts.out and writes manifest.json and plot.py next
// to its data. Errors are reported on `log` and mapped to an exit code.
int run_command(const std::string& command, const Config* config, const RunOptions& opts, std::ostream& log,
                const std::string& experiment = {});

int list_experiments_command(std::ostream& out);

}  // namespace dampwave::cli
