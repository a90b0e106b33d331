#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpinn/problems.hpp"
#include "cpinn/solvers.hpp"

namespace cpinn {

// One experiment: problem + solver settings + output options. Parsed from a
// sectioned key = value file; unknown sections or keys are hard errors (typo
// safety), '#' starts a comment. The full key list lives in docs/config.md.
struct ExperimentConfig {
  std::string problem = "ex1_annulus";  // registry name or "custom"
  std::string output_dir;               // default: derived from the config name
  int precision_bits = 64;
  bool emit_heatmaps = true;
  int heatmap_grid = 200;

  // custom problem definition (only read when problem == "custom")
  std::string custom_domain = "hypercube 2";
  double custom_lambda = 0.01;
  std::string custom_state = "prod_sin";
  std::string custom_control = "state_multiple 1.0";
  std::string custom_pde = "linear 0";
  std::optional<std::pair<double, double>> custom_bounds;

  std::vector<Method> methods{Method::Cpinn};  // compare runs use > 1
  SolverConfig solver;

  ProblemSpec build_problem() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<text>");

// key like "solver.alpha_boundary" or "pm.mu0"; value in file syntax
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);

std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace cpinn
