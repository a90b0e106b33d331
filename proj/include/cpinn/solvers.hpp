#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cpinn/loss.hpp"
#include "cpinn/metrics.hpp"
#include "cpinn/mlp.hpp"
#include "cpinn/problems.hpp"

namespace cpinn {

enum class Method { Cpinn, Aonn, Pm, Alm };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

struct SolverConfig {
  Method method = Method::Cpinn;
  std::vector<int> hidden{30, 30, 30, 30};
  ActivationKind activation = ActivationKind::Tanh;
  std::size_t n_interior = 10000;
  std::size_t n_boundary = 3000;

  // loss weights: alpha_interior <= 0 means the default 1/lambda;
  // alpha_boundary_p <= 0 means alpha_interior * alpha_boundary
  double alpha_boundary = 5.0;
  double alpha_interior = 0.0;

  // optimizer
  bool use_adam = false;
  double adam_lr = 1e-3;
  std::vector<long> adam_milestones;
  int lbfgs_history = 10;

  // budgets (iterations = accepted optimizer steps)
  long cpinn_iters = 15000;
  double aonn_step = 10.0;
  int aonn_outer = 30;
  long aonn_pde_iters = 1000;
  long aonn_fit_iters = 500;
  double pm_mu0 = 0.1;
  double pm_beta = 2.0;
  int pm_outer = 8;
  long pm_first_iters = 6000;
  long pm_rest_iters = 3000;
  double pm_mu_box0 = 1.0;
  double pm_beta_box = 2.0;
  double alm_mu = 0.1;
  int alm_outer = 8;
  long alm_first_iters = 6000;
  long alm_rest_iters = 3000;
  double alm_clip = 0.0;  // multiplier safeguard; 0 = off (mirrors the reference runs)

  std::uint64_t seed = 1;
  std::size_t eval_points = 100000;
  std::size_t trace_eval_points = 20000;  // error/J cadence subset
  long trace_every = 100;
  double constrained_output_scale = 0.1;
  bool resample_each_stage = false;  // fresh collocation draw per sub-problem

  // smooth box projection: 0 = exact clamp with subgradient; > 0 replaces
  // the clamp inside the residual by a softplus-smoothed version with this
  // transition width (the recovered control is always exactly clamped)
  double smooth_projection = 0.0;

  // periodic parameter checkpoints (0 = final checkpoints only)
  long checkpoint_every = 0;
  std::string checkpoint_dir;

  LossWeights weights(double lambda) const {
    LossWeights w = LossWeights::defaults(lambda, alpha_boundary);
    if (alpha_interior > 0.0) {
      w.alpha_interior = alpha_interior;
      w.alpha_boundary_p = alpha_interior * alpha_boundary;
    }
    return w;
  }
};

struct TraceRow {
  long iter = 0;
  double loss_total = 0, loss_state_res = 0, loss_adj_res = 0;
  double loss_bdry_y = 0, loss_bdry_p = 0;
  double J = 0, e2_y = 0, e2_u = 0;
  double wall_ms = 0;
};

struct StageLog {
  int stage = 0;
  long start_iter = 0;
  double mu = 0.0;
  double first_loss = 0.0;  // at the warm-started parameters, current weights
  double last_loss = 0.0;
};

template <class Real>
struct SolveReport {
  Method method = Method::Cpinn;
  std::string problem_name;
  std::uint64_t seed = 0;
  std::string status = "ok";  // ok | stagnated | nan_abort

  Mlp<Real> y_net;
  std::optional<Mlp<Real>> p_net;
  std::optional<Mlp<Real>> u_net;

  std::vector<TraceRow> trace;        // cadence rows; final row == final metrics
  std::vector<double> loss_history;   // one entry per optimizer iteration
  std::vector<StageLog> stages;       // sub-problem log (AONN/PM/ALM)
  std::vector<double> aonn_gap;       // per-outer-step ||lambda u + p||_{L2}

  MetricRow final_metrics;
  bool has_exact = false;
  double wall_seconds = 0.0;
  long total_evals = 0;

  // derived draw seeds actually used (stage-0 training draw and the held-out
  // evaluation draw), echoed so artifacts can be recomputed exactly
  std::uint64_t train_draw_seed = 0;
  std::uint64_t eval_draw_seed = 0;
};

// True when CPINN_DETERMINISTIC_TIMING=1: recorded wall times are zeroed so
// repeated runs are byte-identical.
bool deterministic_timing();

template <class Real>
SolveReport<Real> solve_cpinn(const ProblemSpec& problem, const SolverConfig& cfg);
template <class Real>
SolveReport<Real> solve_aonn(const ProblemSpec& problem, const SolverConfig& cfg);
template <class Real>
SolveReport<Real> solve_pm(const ProblemSpec& problem, const SolverConfig& cfg);
template <class Real>
SolveReport<Real> solve_alm(const ProblemSpec& problem, const SolverConfig& cfg);

template <class Real>
SolveReport<Real> solve(const ProblemSpec& problem, const SolverConfig& cfg);

}  // namespace cpinn
