#pragma once

#include <string>
#include <vector>

#include "qpnls/config.hpp"

namespace qpnls {

struct RunResult {
  int exit_code = 0;         // 0 ok, 3 failed invariant
  std::string run_dir;
  std::vector<std::string> messages;
};

RunResult run_simulate(const RunConfig& c);
RunResult run_verify_bounds(const RunConfig& c);
RunResult run_tree_stats(const RunConfig& c);
RunResult run_asymptotics(const RunConfig& c);
RunResult run_render_tree(const RunConfig& c);

// Dispatch by subcommand name; throws argument_error for unknown names.
RunResult run_subcommand(const std::string& name, const RunConfig& c);

}  // namespace qpnls
