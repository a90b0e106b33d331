#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpinn/config.hpp"

namespace cpinn {

struct RunnerOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> precision;
  std::optional<std::string> output_dir;
};

// CLI verbs. All return a process exit status: 0 success, nonzero with a
// message on stderr otherwise. Artifacts land under $CPINN_OUT_ROOT (default
// ".") joined with the experiment's output_dir.
int run_experiment(const std::string& config_path, const RunnerOptions& opts = {});
int run_comparison(const std::string& config_path, const RunnerOptions& opts = {});
int run_sweep(const std::string& config_path, const std::string& key,
              const std::vector<std::string>& values, const RunnerOptions& opts = {});
int run_verify(const std::string& problem_name, std::size_t grid_n = 2000);
int run_selftest();

std::string output_root();

}  // namespace cpinn
