#include "cpinn/solvers.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "cpinn/batch.hpp"
#include "cpinn/kernels.hpp"
#include "cpinn/numerics.hpp"
#include "cpinn/objectives.hpp"
#include "cpinn/optim.hpp"
#include "cpinn/rng.hpp"

namespace cpinn {

std::string to_string(Method m) {
  switch (m) {
    case Method::Cpinn: return "cpinn";
    case Method::Aonn: return "aonn";
    case Method::Pm: return "pm";
    default: return "alm";
  }
}

Method method_from_string(const std::string& s) {
  if (s == "cpinn") return Method::Cpinn;
  if (s == "aonn") return Method::Aonn;
  if (s == "pm") return Method::Pm;
  if (s == "alm") return Method::Alm;
  throw std::invalid_argument("unknown method '" + s + "' (cpinn | aonn | pm | alm)");
}

bool deterministic_timing() {
  const char* e = std::getenv("CPINN_DETERMINISTIC_TIMING");
  return e && e[0] == '1';
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  return CounterRng(seed).split(tag).key();
}

// Training collocation draw; stage > 0 only under the resampling extension.
std::uint64_t train_seed(std::uint64_t seed, int stage) {
  if (stage == 0) return derive_seed(seed, "train");
  return derive_seed(derive_seed(seed, "train-resample"), std::to_string(stage));
}

std::vector<int> full_widths(int dim, const std::vector<int>& hidden) {
  std::vector<int> w;
  w.push_back(dim);
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(1);
  return w;
}

struct WallClock {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    if (deterministic_timing()) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
  double s() const { return ms() / 1000.0; }
};

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// Held-out evaluation machinery: fixed sample set (seed distinct from the
// training draws), full set for final metrics, prefix subset for cadence
// rows.
template <class Real>
struct EvalContext {
  const ProblemSpec& problem;
  SampleSet set;
  std::size_t nsub;
  ValueBatch<Real> vb_full;
  ValueBatch<Real> vb_sub;
  std::vector<double> yd_full, ex_y_full, ex_u_full;
  std::vector<double> yd_sub, ex_y_sub, ex_u_sub;
  bool has_exact;

  EvalContext(const FieldKernel<Real>& kernel, const ProblemSpec& pr, const SolverConfig& cfg)
      : problem(pr),
        set(sample_interior(pr.domain, cfg.eval_points, derive_seed(cfg.seed, "eval"))),
        nsub(std::min<std::size_t>(cfg.trace_eval_points, set.n)),
        vb_full(kernel, set.points, pr.domain.dim),
        vb_sub(kernel,
               std::span<const double>(set.points.data(), nsub * pr.domain.dim),
               pr.domain.dim),
        has_exact(pr.has_exact()) {
    yd_full.resize(set.n);
    for (std::size_t i = 0; i < set.n; ++i) yd_full[i] = pr.y_d(set.point(i));
    if (has_exact) {
      ex_y_full.resize(set.n);
      ex_u_full.resize(set.n);
      for (std::size_t i = 0; i < set.n; ++i) {
        ex_y_full[i] = pr.exact_y->value(set.point(i));
        ex_u_full[i] = pr.exact_u->value(set.point(i));
      }
    }
    auto prefix = [&](const std::vector<double>& v) {
      return std::vector<double>(v.begin(), v.begin() + nsub);
    };
    yd_sub = prefix(yd_full);
    if (has_exact) {
      ex_y_sub = prefix(ex_y_full);
      ex_u_sub = prefix(ex_u_full);
    }
  }

  std::vector<double> control_from(const ValueBatch<Real>& vb, const Mlp<Real>& net,
                                   bool from_adjoint) const {
    auto vals = vb.eval(net);
    if (from_adjoint)
      for (auto& v : vals) v = problem.recover_control(v);
    return vals;
  }

  // J and relative errors; fills a trace row (subset) or a metric row (full).
  void measure(const Mlp<Real>& y_net, const Mlp<Real>& ctrl_net, bool from_adjoint, bool full,
               double* J, double* e2y, double* e2u, double* einf_y = nullptr,
               double* einf_u = nullptr) const {
    const ValueBatch<Real>& vb = full ? vb_full : vb_sub;
    const auto& yd = full ? yd_full : yd_sub;
    const auto& ey = full ? ex_y_full : ex_y_sub;
    const auto& eu = full ? ex_u_full : ex_u_sub;
    const auto y_vals = vb.eval(y_net);
    const auto u_vals = control_from(vb, ctrl_net, from_adjoint);
    *J = objective_J_values(y_vals, u_vals, yd, set.support_measure, problem.lambda);
    if (has_exact) {
      *e2y = relative_error(y_vals, ey, ErrorNorm::L2);
      *e2u = relative_error(u_vals, eu, ErrorNorm::L2);
      if (einf_y) *einf_y = relative_error(y_vals, ey, ErrorNorm::Linf);
      if (einf_u) *einf_u = relative_error(u_vals, eu, ErrorNorm::Linf);
    } else {
      *e2y = *e2u = nan_value();
      if (einf_y) *einf_y = nan_value();
      if (einf_u) *einf_u = nan_value();
    }
  }
};

template <class Real>
std::vector<Real> concat_params(const Mlp<Real>& a, const Mlp<Real>& b) {
  std::vector<Real> t(a.params);
  t.insert(t.end(), b.params.begin(), b.params.end());
  return t;
}

// One optimizer sub-problem: returns final parameters; appends per-iteration
// losses; forwards accepted iterations to on_iter with a global index.
template <class Real>
struct SubProblem {
  const SolverConfig& cfg;
  long* global_iter;
  std::vector<double>* loss_history;
  std::string* status;  // escalates "ok" -> "stagnated"
  long* total_evals;

  std::vector<Real> run(const LossGradFn<Real>& fn, std::vector<Real> theta, long iters,
                        double adam_lr,
                        const std::function<void(long, std::span<const Real>)>& after_iter) {
    if (iters <= 0) return theta;
    const auto cb = [&](long, double loss, std::span<const Real> th) {
      ++*global_iter;
      loss_history->push_back(loss);
      if (after_iter) after_iter(*global_iter, th);
    };
    if (cfg.use_adam) {
      AdamRunOptions opts;
      opts.iters = iters;
      opts.lr = adam_lr;
      opts.milestones = cfg.adam_milestones;
      auto res = adam_minimize<Real>(fn, std::move(theta), opts, cb);
      *total_evals += res.evals;
      return std::move(res.theta);
    }
    LbfgsOptions opts;
    opts.max_iters = iters;
    opts.history = cfg.lbfgs_history;
    auto res = lbfgs_minimize<Real>(fn, std::move(theta), opts, cb);
    *total_evals += res.evals;
    if (res.status == "stagnated") *status = "stagnated";
    return std::move(res.theta);
  }
};

template <class Real>
void finalize_report(SolveReport<Real>& rep, const EvalContext<Real>& ev,
                     const Mlp<Real>& ctrl_net, bool from_adjoint, const WallClock& clock,
                     long final_iter) {
  MetricRow m;
  ev.measure(rep.y_net, ctrl_net, from_adjoint, /*full=*/true, &m.J, &m.e2_y, &m.e2_u, &m.einf_y,
             &m.einf_u);
  m.time_s = clock.s();
  rep.final_metrics = m;
  rep.wall_seconds = clock.s();
  TraceRow row;
  if (!rep.trace.empty()) row = rep.trace.back();
  row.iter = final_iter;
  row.J = m.J;
  row.e2_y = m.e2_y;
  row.e2_u = m.e2_u;
  row.wall_ms = clock.ms();
  if (!rep.trace.empty() && rep.trace.back().iter == final_iter)
    rep.trace.back() = row;
  else
    rep.trace.push_back(row);
}

}  // namespace

// ------------------------------------------------------------------ C-PINN

template <class Real>
SolveReport<Real> solve_cpinn(const ProblemSpec& problem, const SolverConfig& cfg) {
  WallClock clock;
  const auto& kernel = select_kernel<Real>();
  const LossWeights w = cfg.weights(problem.lambda);
  const auto widths = full_widths(problem.domain.dim, cfg.hidden);

  Mlp<Real> y = init_mlp<Real>(widths, cfg.activation, derive_seed(cfg.seed, "net-y"));
  Mlp<Real> p = init_mlp<Real>(widths, cfg.activation, derive_seed(cfg.seed, "net-p"));
  if (problem.bounds) scale_output_layer(p, cfg.constrained_output_scale);

  std::unique_ptr<CpinnObjective<Real>> obj;
  auto build_objective = [&](int stage) {
    SampleSet interior =
        sample_interior(problem.domain, cfg.n_interior, train_seed(cfg.seed, stage));
    SampleSet boundary =
        sample_boundary(problem.domain, cfg.n_boundary, train_seed(cfg.seed, stage));
    obj = std::make_unique<CpinnObjective<Real>>(kernel, problem, y.shape, p.shape, interior,
                                                 boundary, w, cfg.smooth_projection);
  };
  build_objective(0);
  EvalContext<Real> ev(kernel, problem, cfg);

  SolveReport<Real> rep;
  rep.method = Method::Cpinn;
  rep.problem_name = problem.name;
  rep.seed = cfg.seed;
  rep.has_exact = ev.has_exact;
  rep.train_draw_seed = train_seed(cfg.seed, 0);
  rep.eval_draw_seed = derive_seed(cfg.seed, "eval");

  std::vector<Real> theta = concat_params(y, p);
  std::vector<Real> last_good = theta;
  const std::size_t ny = y.param_count();

  auto unpack = [&](std::span<const Real> th) {
    y.set_flat(th.first(ny));
    p.set_flat(th.subspan(ny));
  };

  auto emit_row = [&](long iter, std::span<const Real> th) {
    unpack(th);
    obj->eval(th, {});
    const LossBreakdown& b = obj->last_breakdown();
    TraceRow row;
    row.iter = iter;
    row.loss_total = b.total;
    row.loss_state_res = b.state_residual_term;
    row.loss_adj_res = b.adjoint_residual_term;
    row.loss_bdry_y = b.boundary_y_term;
    row.loss_bdry_p = b.boundary_p_term;
    ev.measure(y, p, /*from_adjoint=*/true, /*full=*/false, &row.J, &row.e2_y, &row.e2_u);
    row.wall_ms = clock.ms();
    if (!rep.trace.empty() && rep.trace.back().iter == iter)
      rep.trace.back() = row;
    else
      rep.trace.push_back(row);
  };

  emit_row(0, theta);

  long global_iter = 0;
  SubProblem<Real> sub{cfg, &global_iter, &rep.loss_history, &rep.status, &rep.total_evals};
  LossGradFn<Real> fn = [&](std::span<const Real> th, std::span<Real> gr) {
    return obj->eval(th, gr);
  };
  const auto after_iter = [&](long iter, std::span<const Real> th) {
    last_good.assign(th.begin(), th.end());
    if (cfg.trace_every > 0 && iter % cfg.trace_every == 0 && iter != cfg.cpinn_iters)
      emit_row(iter, th);
    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_dir.empty() &&
        iter % cfg.checkpoint_every == 0) {
      unpack(th);
      save_checkpoint(cfg.checkpoint_dir + "/ckpt_" + std::to_string(iter) + "_y.txt", y);
      save_checkpoint(cfg.checkpoint_dir + "/ckpt_" + std::to_string(iter) + "_p.txt", p);
    }
  };
  try {
    const int chunks = cfg.resample_each_stage ? 8 : 1;
    const long per_chunk = cfg.cpinn_iters / chunks;
    for (int c = 0; c < chunks; ++c) {
      if (c > 0) build_objective(c);
      const long budget = (c == chunks - 1) ? cfg.cpinn_iters - per_chunk * c : per_chunk;
      theta = sub.run(fn, std::move(theta), budget, cfg.adam_lr, after_iter);
    }
  } catch (const OptimError&) {
    rep.status = "nan_abort";
    theta = last_good;
  }

  unpack(theta);
  emit_row(global_iter, theta);  // loss columns at the final parameters
  rep.y_net = y;
  rep.p_net = p;
  finalize_report(rep, ev, p, /*from_adjoint=*/true, clock, global_iter);
  return rep;
}

// -------------------------------------------------------------------- AONN

template <class Real>
SolveReport<Real> solve_aonn(const ProblemSpec& problem, const SolverConfig& cfg) {
  WallClock clock;
  const auto& kernel = select_kernel<Real>();
  const auto widths = full_widths(problem.domain.dim, cfg.hidden);

  Mlp<Real> y = init_mlp<Real>(widths, cfg.activation, derive_seed(cfg.seed, "net-y"));
  Mlp<Real> p = init_mlp<Real>(widths, cfg.activation, derive_seed(cfg.seed, "net-p"));
  Mlp<Real> u = init_mlp<Real>(widths, cfg.activation, derive_seed(cfg.seed, "net-u"));
  if (problem.bounds) scale_output_layer(u, cfg.constrained_output_scale);

  using FPO = ForwardPinnObjective<Real>;
  SampleSet interior, boundary;
  std::unique_ptr<FPO> state, adjoint;
  std::unique_ptr<ControlFitObjective<Real>> fit;
  std::unique_ptr<ValueBatch<Real>> train_vb;
  auto build_objectives = [&](int stage) {
    interior = sample_interior(problem.domain, cfg.n_interior, train_seed(cfg.seed, stage));
    boundary = sample_boundary(problem.domain, cfg.n_boundary, train_seed(cfg.seed, stage));
    state = std::make_unique<FPO>(kernel, problem, y.shape, interior, boundary,
                                  cfg.alpha_boundary, FPO::Kind::State);
    adjoint = std::make_unique<FPO>(kernel, problem, p.shape, interior, boundary,
                                    cfg.alpha_boundary, FPO::Kind::Adjoint);
    fit = std::make_unique<ControlFitObjective<Real>>(kernel, problem.domain, u.shape, interior);
    train_vb = std::make_unique<ValueBatch<Real>>(kernel, interior.points, problem.domain.dim);
  };
  build_objectives(0);
  EvalContext<Real> ev(kernel, problem, cfg);

  SolveReport<Real> rep;
  rep.method = Method::Aonn;
  rep.problem_name = problem.name;
  rep.seed = cfg.seed;
  rep.has_exact = ev.has_exact;
  rep.train_draw_seed = train_seed(cfg.seed, 0);
  rep.eval_draw_seed = derive_seed(cfg.seed, "eval");

  long global_iter = 0;
  SubProblem<Real> sub{cfg, &global_iter, &rep.loss_history, &rep.status, &rep.total_evals};

  LossGradFn<Real> fn_state = [&](std::span<const Real> th, std::span<Real> gr) {
    return state->eval(th, gr);
  };
  LossGradFn<Real> fn_adjoint = [&](std::span<const Real> th, std::span<Real> gr) {
    return adjoint->eval(th, gr);
  };
  LossGradFn<Real> fn_fit = [&](std::span<const Real> th, std::span<Real> gr) {
    return fit->eval(th, gr);
  };

  auto emit_row = [&](long iter) {
    // recomputable stage-end snapshot: freeze the current nets into the
    // state/adjoint residuals
    auto u_vals = train_vb->eval(u);
    auto y_vals = train_vb->eval(y);
    state->set_fixed_values(u_vals);
    adjoint->set_fixed_values(y_vals);
    const double ls = state->eval(y.params, {});
    const double la = adjoint->eval(p.params, {});
    TraceRow row;
    row.iter = iter;
    row.loss_total = ls + la;
    row.loss_state_res = state->residual_term();
    row.loss_bdry_y = state->boundary_term();
    row.loss_adj_res = adjoint->residual_term();
    row.loss_bdry_p = adjoint->boundary_term();
    ev.measure(y, u, /*from_adjoint=*/false, /*full=*/false, &row.J, &row.e2_y, &row.e2_u);
    row.wall_ms = clock.ms();
    if (!rep.trace.empty() && rep.trace.back().iter == iter)
      rep.trace.back() = row;
    else
      rep.trace.push_back(row);
  };

  emit_row(0);

  try {
    for (int k = 1; k <= cfg.aonn_outer; ++k) {
      if (cfg.resample_each_stage && k > 1) build_objectives(k - 1);
      const double wi = interior.support_measure / static_cast<double>(interior.n);
      const double lr_k = (k == 1) ? cfg.adam_lr : cfg.adam_lr * 0.1;
      StageLog stage;
      stage.stage = k;
      stage.start_iter = global_iter;

      auto u_vals = train_vb->eval(u);
      state->set_fixed_values(u_vals);
      stage.first_loss = state->eval(y.params, {});
      y.set_flat(sub.run(fn_state, y.params, cfg.aonn_pde_iters, lr_k, {}));
      stage.last_loss = state->eval(y.params, {});

      auto y_vals = train_vb->eval(y);
      adjoint->set_fixed_values(y_vals);
      p.set_flat(sub.run(fn_adjoint, p.params, cfg.aonn_pde_iters, lr_k, {}));

      auto p_vals = train_vb->eval(p);
      std::vector<double> targets(interior.n);
      for (std::size_t i = 0; i < interior.n; ++i) {
        double t = u_vals[i] - cfg.aonn_step * (problem.lambda * u_vals[i] + p_vals[i]);
        if (problem.bounds) t = clamp(t, problem.bounds->first, problem.bounds->second);
        targets[i] = t;
      }
      fit->set_targets(std::move(targets));
      u.set_flat(sub.run(fn_fit, u.params, cfg.aonn_fit_iters, lr_k, {}));

      // optimality gap ||lambda u + p||_{L2(Omega)} on the training points
      u_vals = train_vb->eval(u);
      std::vector<double> gap_terms(interior.n);
      for (std::size_t i = 0; i < interior.n; ++i) {
        const double gterm = problem.lambda * u_vals[i] + p_vals[i];
        gap_terms[i] = wi * gterm * gterm;
      }
      rep.aonn_gap.push_back(std::sqrt(pairwise_sum(gap_terms)));
      rep.stages.push_back(stage);
      emit_row(global_iter);
      if (cfg.checkpoint_every > 0 && !cfg.checkpoint_dir.empty()) {
        const std::string tag = "/ckpt_stage" + std::to_string(k);
        save_checkpoint(cfg.checkpoint_dir + tag + "_y.txt", y);
        save_checkpoint(cfg.checkpoint_dir + tag + "_p.txt", p);
        save_checkpoint(cfg.checkpoint_dir + tag + "_u.txt", u);
      }
    }
  } catch (const OptimError&) {
    rep.status = "nan_abort";
  }

  rep.y_net = y;
  rep.p_net = p;
  rep.u_net = u;
  finalize_report(rep, ev, u, /*from_adjoint=*/false, clock, global_iter);
  return rep;
}

// ----------------------------------------------------------------- PM/ALM

namespace {

template <class Real>
SolveReport<Real> solve_penalty(const ProblemSpec& problem, const SolverConfig& cfg,
                                bool with_multipliers) {
  WallClock clock;
  if (with_multipliers && cfg.resample_each_stage)
    throw std::invalid_argument(
        "ALM stores pointwise multipliers on the collocation points and cannot resample them");
  const auto& kernel = select_kernel<Real>();
  const auto widths = full_widths(problem.domain.dim, cfg.hidden);

  Mlp<Real> y = init_mlp<Real>(widths, cfg.activation, derive_seed(cfg.seed, "net-y"));
  Mlp<Real> u = init_mlp<Real>(widths, cfg.activation, derive_seed(cfg.seed, "net-u"));
  if (problem.bounds) scale_output_layer(u, cfg.constrained_output_scale);

  std::unique_ptr<PenaltyObjective<Real>> obj;
  auto build_objective = [&](int stage) {
    SampleSet interior =
        sample_interior(problem.domain, cfg.n_interior, train_seed(cfg.seed, stage));
    SampleSet boundary =
        sample_boundary(problem.domain, cfg.n_boundary, train_seed(cfg.seed, stage));
    obj = std::make_unique<PenaltyObjective<Real>>(kernel, problem, y.shape, u.shape, interior,
                                                   boundary, cfg.alpha_boundary,
                                                   with_multipliers);
  };
  build_objective(0);
  EvalContext<Real> ev(kernel, problem, cfg);

  SolveReport<Real> rep;
  rep.method = with_multipliers ? Method::Alm : Method::Pm;
  rep.problem_name = problem.name;
  rep.seed = cfg.seed;
  rep.has_exact = ev.has_exact;
  rep.train_draw_seed = train_seed(cfg.seed, 0);
  rep.eval_draw_seed = derive_seed(cfg.seed, "eval");

  std::vector<Real> theta = concat_params(y, u);
  std::vector<Real> last_good = theta;
  const std::size_t ny = y.param_count();
  auto unpack = [&](std::span<const Real> th) {
    y.set_flat(th.first(ny));
    u.set_flat(th.subspan(ny));
  };

  auto emit_row = [&](long iter, std::span<const Real> th) {
    unpack(th);
    const double total = obj->eval(th, {});
    TraceRow row;
    row.iter = iter;
    row.loss_total = total;
    row.loss_state_res = obj->state_residual_ms();
    row.loss_bdry_y = obj->boundary_ms();
    ev.measure(y, u, /*from_adjoint=*/false, /*full=*/false, &row.J, &row.e2_y, &row.e2_u);
    row.wall_ms = clock.ms();
    if (!rep.trace.empty() && rep.trace.back().iter == iter)
      rep.trace.back() = row;
    else
      rep.trace.push_back(row);
  };

  const int outer = with_multipliers ? cfg.alm_outer : cfg.pm_outer;
  const long first_iters = with_multipliers ? cfg.alm_first_iters : cfg.pm_first_iters;
  const long rest_iters = with_multipliers ? cfg.alm_rest_iters : cfg.pm_rest_iters;

  obj->set_mu(with_multipliers ? cfg.alm_mu : cfg.pm_mu0);
  if (problem.bounds) obj->set_mu_box(cfg.pm_mu_box0);
  emit_row(0, theta);

  long global_iter = 0;
  SubProblem<Real> sub{cfg, &global_iter, &rep.loss_history, &rep.status, &rep.total_evals};
  LossGradFn<Real> fn = [&](std::span<const Real> th, std::span<Real> gr) {
    return obj->eval(th, gr);
  };

  try {
    for (int k = 0; k < outer; ++k) {
      if (cfg.resample_each_stage && k > 0) build_objective(k);
      const double mu_k = with_multipliers ? cfg.alm_mu : cfg.pm_mu0 * std::pow(cfg.pm_beta, k);
      obj->set_mu(mu_k);
      if (problem.bounds) obj->set_mu_box(cfg.pm_mu_box0 * std::pow(cfg.pm_beta_box, k));

      StageLog stage;
      stage.stage = k;
      stage.start_iter = global_iter;
      stage.mu = mu_k;
      stage.first_loss = obj->eval(theta, {});
      const long budget = (k == 0) ? first_iters : rest_iters;
      const double lr_k = (k == 0) ? cfg.adam_lr : cfg.adam_lr * 0.1;
      theta = sub.run(fn, std::move(theta), budget, lr_k,
                      [&](long iter, std::span<const Real> th) {
                        last_good.assign(th.begin(), th.end());
                        if (cfg.trace_every > 0 && iter % cfg.trace_every == 0)
                          emit_row(iter, th);
                        if (cfg.checkpoint_every > 0 && !cfg.checkpoint_dir.empty() &&
                            iter % cfg.checkpoint_every == 0) {
                          unpack(th);
                          save_checkpoint(cfg.checkpoint_dir + "/ckpt_" +
                                              std::to_string(iter) + "_y.txt", y);
                          save_checkpoint(cfg.checkpoint_dir + "/ckpt_" +
                                              std::to_string(iter) + "_u.txt", u);
                        }
                      });
      stage.last_loss = obj->eval(theta, {});  // also refreshes the residuals
      if (with_multipliers) obj->update_multipliers(cfg.alm_clip);
      rep.stages.push_back(stage);
    }
  } catch (const OptimError&) {
    rep.status = "nan_abort";
    theta = last_good;
  }

  unpack(theta);
  emit_row(global_iter, theta);  // loss columns at the final parameters
  rep.y_net = y;
  rep.u_net = u;
  finalize_report(rep, ev, u, /*from_adjoint=*/false, clock, global_iter);
  return rep;
}

}  // namespace

template <class Real>
SolveReport<Real> solve_pm(const ProblemSpec& problem, const SolverConfig& cfg) {
  return solve_penalty<Real>(problem, cfg, /*with_multipliers=*/false);
}

template <class Real>
SolveReport<Real> solve_alm(const ProblemSpec& problem, const SolverConfig& cfg) {
  return solve_penalty<Real>(problem, cfg, /*with_multipliers=*/true);
}

template <class Real>
SolveReport<Real> solve(const ProblemSpec& problem, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::Cpinn: return solve_cpinn<Real>(problem, cfg);
    case Method::Aonn: return solve_aonn<Real>(problem, cfg);
    case Method::Pm: return solve_pm<Real>(problem, cfg);
    default: return solve_alm<Real>(problem, cfg);
  }
}

template SolveReport<double> solve_cpinn<double>(const ProblemSpec&, const SolverConfig&);
template SolveReport<double> solve_aonn<double>(const ProblemSpec&, const SolverConfig&);
template SolveReport<double> solve_pm<double>(const ProblemSpec&, const SolverConfig&);
template SolveReport<double> solve_alm<double>(const ProblemSpec&, const SolverConfig&);
template SolveReport<double> solve<double>(const ProblemSpec&, const SolverConfig&);
template SolveReport<float> solve_cpinn<float>(const ProblemSpec&, const SolverConfig&);
template SolveReport<float> solve_aonn<float>(const ProblemSpec&, const SolverConfig&);
template SolveReport<float> solve_pm<float>(const ProblemSpec&, const SolverConfig&);
template SolveReport<float> solve_alm<float>(const ProblemSpec&, const SolverConfig&);
template SolveReport<float> solve<float>(const ProblemSpec&, const SolverConfig&);

}  // namespace cpinn
