// commands.hpp - the four sweep commands and the CLI entry point
#pragma once

#include <functional>
#include <iosfwd>
#include <optional>

#include "cli/run_config.hpp"
#include "cli/table.hpp"

namespace phaseloss::cli {

struct CommandOutput {
  Table table;
  std::optional<Table> coefficients;  // optimize only
};

// Called after each finished sweep point (from worker threads, serialized).
using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

CommandOutput cmd_optimize(const RunConfig& cfg, const ProgressFn& progress = {});
CommandOutput cmd_gaussian_scan(const RunConfig& cfg, const ProgressFn& progress = {});
CommandOutput cmd_measure(const RunConfig& cfg, const ProgressFn& progress = {});
CommandOutput cmd_bounds(const RunConfig& cfg, const ProgressFn& progress = {});
CommandOutput run_command(const RunConfig& cfg, const ProgressFn& progress = {});

nlohmann::json config_echo(const RunConfig& cfg);

// Exit codes: 0 success, 2 configuration / IO error, 3 numerical failure.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace phaseloss::cli
