#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cpi/scenario.hpp"

namespace cpi {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  int threads = 0;  // 0 = hardware concurrency
  std::optional<EvalPath> path;
  std::optional<RunMode> mode;
};

struct RunResult {
  std::vector<std::filesystem::path> artifacts;
  std::string report;  // dof mode only
  std::vector<std::string> warnings;
};

RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace cpi
