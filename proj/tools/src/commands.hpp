#pragma once

#include <iosfwd>
#include <string>

#include "cli_config.hpp"

namespace nfloc::cli {

/// Exit codes of the tool.
enum Exit : int { ok = 0, config_error = 2, pipeline_failure = 3 };

struct RunContext {
  CliConfig config;
  std::string out_dir;
  std::ostream* log = nullptr;  // human-readable summary
};

int cmd_simulate(const RunContext& ctx);
int cmd_sweep(const RunContext& ctx);
int cmd_heatmap(const RunContext& ctx);
int cmd_cdf(const RunContext& ctx);
int cmd_peb(const RunContext& ctx);
int cmd_bench(const RunContext& ctx);
int cmd_selftest(const RunContext& ctx);

/// Parses argv, loads the configuration and dispatches. Never throws.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace nfloc::cli
