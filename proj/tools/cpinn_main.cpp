// Command-line driver: run / compare / sweep experiments, verify benchmark
// data, and exercise the built-in self tests.

#include <CLI11.hpp>
#include <string>
#include <vector>

#include "cpinn/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "cpinn - physics-informed solvers for elliptic optimal control\n"
      "Environment: CPINN_OUT_ROOT (artifact root), CPINN_THREADS,\n"
      "CPINN_KERNEL (scalar|avx2|avx512), CPINN_DETERMINISTIC_TIMING"};
  app.require_subcommand(1);

  std::string config_path, sweep_key, problem_name;
  std::vector<std::string> sweep_values;
  cpinn::RunnerOptions opts;
  std::uint64_t seed = 0;
  int precision = 0;
  std::string out_dir;
  std::size_t grid_n = 2000;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("config", config_path, "experiment config file")->required();
    cmd->add_option("--seed", seed, "override the experiment seed");
    cmd->add_option("--precision", precision, "override precision (32 or 64)")
        ->check(CLI::IsMember({32, 64}));
    cmd->add_option("--out", out_dir, "override the output directory");
  };

  auto* run = app.add_subcommand("run", "run one configured solver");
  add_common(run);
  auto* compare = app.add_subcommand("compare", "run every configured method on one problem");
  add_common(compare);
  auto* sweep = app.add_subcommand("sweep", "re-run one config over a list of override values");
  add_common(sweep);
  sweep->add_option("key", sweep_key, "config key to vary, e.g. pm.mu0")->required();
  sweep->add_option("values", sweep_values, "values to try")->required()->expected(-1);

  auto* verify = app.add_subcommand("verify", "check a benchmark's data against its KKT system");
  verify->add_option("problem", problem_name, "problem name, e.g. ex1_annulus")->required();
  verify->add_option("--grid-n", grid_n, "number of random check points");

  app.add_subcommand("selftest", "run the built-in derivative/kernel/bound suites");

  CLI11_PARSE(app, argc, argv);

  const auto fill = [&](CLI::App* cmd) {
    if (cmd->count("--seed")) opts.seed = seed;
    if (cmd->count("--precision")) opts.precision = precision;
    if (cmd->count("--out")) opts.output_dir = out_dir;
  };

  if (run->parsed()) {
    fill(run);
    return cpinn::run_experiment(config_path, opts);
  }
  if (compare->parsed()) {
    fill(compare);
    return cpinn::run_comparison(config_path, opts);
  }
  if (sweep->parsed()) {
    fill(sweep);
    return cpinn::run_sweep(config_path, sweep_key, sweep_values, opts);
  }
  if (verify->parsed()) return cpinn::run_verify(problem_name, grid_n);
  return cpinn::run_selftest();
}
