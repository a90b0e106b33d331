#include "cpinn/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cpinn/batch.hpp"
#include "cpinn/bounds.hpp"
#include "cpinn/eval_ref.hpp"
#include "cpinn/heatmap.hpp"
#include "cpinn/kernels.hpp"
#include "cpinn/rng.hpp"
#include "cpinn/solvers.hpp"

namespace fs = std::filesystem;

namespace cpinn {

std::string output_root() {
  if (const char* e = std::getenv("CPINN_OUT_ROOT"); e && *e) return e;
  return ".";
}

namespace {

std::string stem_of(const std::string& path) {
  return fs::path(path).stem().string();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  os.precision(12);
  os << "iter,loss_total,loss_state_res,loss_adj_res,loss_bdry_y,loss_bdry_p,J,e2_y,e2_u,"
        "wall_ms\n";
  for (const auto& r : rows)
    os << r.iter << ',' << r.loss_total << ',' << r.loss_state_res << ',' << r.loss_adj_res
       << ',' << r.loss_bdry_y << ',' << r.loss_bdry_p << ',' << r.J << ',' << r.e2_y << ','
       << r.e2_u << ',' << r.wall_ms << '\n';
  return os.str();
}

template <class Real>
void write_artifacts(const fs::path& dir, const ExperimentConfig& cfg,
                     const ProblemSpec& problem, const SolveReport<Real>& rep) {
  fs::create_directories(dir);
  write_file(dir / "config_echo.cfg", serialize_config(cfg));
  write_file(dir / "trace.csv", trace_csv(rep.trace));
  {
    std::ostringstream os;
    os.precision(12);
    os << "iter,loss\n";
    for (std::size_t i = 0; i < rep.loss_history.size(); ++i)
      os << (i + 1) << ',' << rep.loss_history[i] << '\n';
    write_file(dir / "loss_history.csv", os.str());
  }
  if (!rep.stages.empty()) {
    std::ostringstream os;
    os.precision(12);
    os << "stage,start_iter,mu,first_loss,last_loss\n";
    for (const auto& st : rep.stages)
      os << st.stage << ',' << st.start_iter << ',' << st.mu << ',' << st.first_loss << ','
         << st.last_loss << '\n';
    write_file(dir / "stages.csv", os.str());
  }
  if (!rep.aonn_gap.empty()) {
    std::ostringstream os;
    os.precision(12);
    os << "outer,gap_l2\n";
    for (std::size_t k = 0; k < rep.aonn_gap.size(); ++k)
      os << (k + 1) << ',' << rep.aonn_gap[k] << '\n';
    write_file(dir / "aonn_gap.csv", os.str());
  }
  write_file(dir / "metrics.csv", metric_csv_header() + "\n" +
                                      metric_csv_row(to_string(rep.method), rep.final_metrics) +
                                      "\n");
  {
    std::ostringstream os;
    os << "status " << rep.status << "\nseed " << rep.seed << "\ntrain_draw_seed "
       << rep.train_draw_seed << "\neval_draw_seed " << rep.eval_draw_seed << "\ntotal_evals "
       << rep.total_evals << "\nwall_seconds " << rep.wall_seconds << "\nkernel "
       << select_kernel<Real>().name() << "\n";
    write_file(dir / "run_info.txt", os.str());
  }
  save_checkpoint((dir / "y_net.txt").string(), rep.y_net);
  if (rep.p_net) save_checkpoint((dir / "p_net.txt").string(), *rep.p_net);
  if (rep.u_net) save_checkpoint((dir / "u_net.txt").string(), *rep.u_net);

  if (cfg.emit_heatmaps && problem.domain.dim >= 2) {
    const auto grid = HeatmapGrid::build(problem.domain, cfg.heatmap_grid);
    const auto& kernel = select_kernel<Real>();
    ValueBatch<Real> vb(kernel, grid.points, problem.domain.dim);
    auto y_vals = vb.eval(rep.y_net);
    std::vector<double> u_vals;
    if (rep.method == Method::Cpinn) {
      u_vals = vb.eval(*rep.p_net);
      for (auto& v : u_vals) v = problem.recover_control(v);
    } else {
      u_vals = vb.eval(*rep.u_net);
    }
    std::ostringstream ranges;
    ranges.precision(12);
    ranges << "name,vmin,vmax\n";
    auto emit = [&](const std::string& name, std::span<const double> vals) {
      const auto [lo, hi] = write_heatmap((dir / (name + ".ppm")).string(), grid, vals);
      ranges << name << ',' << lo << ',' << hi << '\n';
    };
    emit("heatmap_u", u_vals);
    emit("heatmap_y", y_vals);
    if (problem.has_exact()) {
      std::vector<double> err(u_vals.size());
      const int d = problem.domain.dim;
      for (std::size_t i = 0; i < err.size(); ++i) {
        const std::span<const double> x(grid.points.data() + i * d, static_cast<std::size_t>(d));
        err[i] = std::fabs(u_vals[i] - problem.exact_u->value(x));
      }
      emit("heatmap_u_err", err);
    }
    write_file(dir / "heatmaps.csv", ranges.str());
  }
}

template <class Real>
int run_methods(const ExperimentConfig& cfg, const fs::path& dir, bool comparison) {
  const ProblemSpec problem = cfg.build_problem();
  int status = 0;
  std::ostringstream table;
  table << metric_csv_header() << "\n";
  for (Method m : cfg.methods) {
    SolverConfig scfg = cfg.solver;
    scfg.method = m;
    const fs::path mdir = comparison ? dir / to_string(m) : dir;
    if (scfg.checkpoint_every > 0) {
      fs::create_directories(mdir);
      scfg.checkpoint_dir = mdir.string();
    }
    try {
      SolveReport<Real> rep = solve<Real>(problem, scfg);
      write_artifacts(mdir, cfg, problem, rep);
      table << metric_csv_row(to_string(m), rep.final_metrics) << "\n";
      if (rep.status == "nan_abort") {
        std::cerr << "cpinn: " << to_string(m)
                  << " aborted on a non-finite loss; last good checkpoint saved\n";
        status = 2;
      } else if (rep.status == "stagnated") {
        std::cerr << "cpinn: " << to_string(m)
                  << " line search stagnated before exhausting its budget\n";
      }
      std::cout << to_string(m) << ": e2_y=" << rep.final_metrics.e2_y
                << " e2_u=" << rep.final_metrics.e2_u << " J=" << rep.final_metrics.J
                << " (" << rep.status << ")\n";
    } catch (const std::exception& e) {
      std::cerr << "cpinn: method " << to_string(m) << " failed: " << e.what() << "\n";
      table << to_string(m) << ",failed,failed,failed,failed,failed,failed\n";
      if (!comparison) return 1;
      status = 1;
    }
  }
  if (comparison) {
    fs::create_directories(dir);
    write_file(dir / "comparison.csv", table.str());
  }
  return status;
}

ExperimentConfig load_with_overrides(const std::string& config_path, const RunnerOptions& opts) {
  ExperimentConfig cfg = parse_config_file(config_path);
  if (opts.seed) cfg.solver.seed = *opts.seed;
  if (opts.precision) {
    if (*opts.precision != 32 && *opts.precision != 64)
      throw std::invalid_argument("precision must be 32 or 64");
    cfg.precision_bits = *opts.precision;
  }
  if (opts.output_dir) cfg.output_dir = *opts.output_dir;
  if (cfg.output_dir.empty()) cfg.output_dir = stem_of(config_path);
  return cfg;
}

}  // namespace

int run_experiment(const std::string& config_path, const RunnerOptions& opts) {
  try {
    ExperimentConfig cfg = load_with_overrides(config_path, opts);
    if (cfg.methods.size() != 1) {
      std::cerr << "cpinn: run expects one method; use `compare` for several\n";
      return 1;
    }
    const fs::path dir = fs::path(output_root()) / cfg.output_dir;
    return cfg.precision_bits == 32 ? run_methods<float>(cfg, dir, false)
                                    : run_methods<double>(cfg, dir, false);
  } catch (const std::exception& e) {
    std::cerr << "cpinn: " << e.what() << "\n";
    return 1;
  }
}

int run_comparison(const std::string& config_path, const RunnerOptions& opts) {
  try {
    ExperimentConfig cfg = load_with_overrides(config_path, opts);
    const fs::path dir = fs::path(output_root()) / cfg.output_dir;
    return cfg.precision_bits == 32 ? run_methods<float>(cfg, dir, true)
                                    : run_methods<double>(cfg, dir, true);
  } catch (const std::exception& e) {
    std::cerr << "cpinn: " << e.what() << "\n";
    return 1;
  }
}

int run_sweep(const std::string& config_path, const std::string& key,
              const std::vector<std::string>& values, const RunnerOptions& opts) {
  try {
    if (values.empty()) {
      std::cerr << "cpinn: sweep needs at least one value\n";
      return 1;
    }
    ExperimentConfig base = load_with_overrides(config_path, opts);
    if (base.methods.size() != 1) {
      std::cerr << "cpinn: sweep expects a single-method config\n";
      return 1;
    }
    const fs::path dir = fs::path(output_root()) / base.output_dir;
    fs::create_directories(dir);
    std::ostringstream table;
    table << "value," << metric_csv_header() << "\n";
    int status = 0;
    for (const auto& v : values) {
      ExperimentConfig cfg = base;
      apply_override(cfg, key, v);
      const ProblemSpec problem = cfg.build_problem();
      const fs::path vdir = dir / ("sweep_" + v);
      try {
        if (cfg.precision_bits == 32) {
          auto rep = solve<float>(problem, cfg.solver);
          write_artifacts(vdir, cfg, problem, rep);
          table << v << ',' << metric_csv_row(to_string(cfg.solver.method), rep.final_metrics)
                << "\n";
        } else {
          auto rep = solve<double>(problem, cfg.solver);
          write_artifacts(vdir, cfg, problem, rep);
          table << v << ',' << metric_csv_row(to_string(cfg.solver.method), rep.final_metrics)
                << "\n";
        }
        std::cout << key << " = " << v << ": done\n";
      } catch (const std::exception& e) {
        std::cerr << "cpinn: sweep value " << v << " failed: " << e.what() << "\n";
        table << v << ',' << to_string(cfg.solver.method)
              << ",failed,failed,failed,failed,failed,failed\n";
        status = 1;
      }
    }
    write_file(dir / "sweep.csv", table.str());
    return status;
  } catch (const std::exception& e) {
    std::cerr << "cpinn: " << e.what() << "\n";
    return 1;
  }
}

int run_verify(const std::string& problem_name, std::size_t grid_n) {
  try {
    const ProblemSpec problem = load_problem(problem_name);
    const ConsistencyReport rep = verify_manufactured(problem, grid_n);
    std::cout << "problem: " << problem_name << "\n"
              << "max |state residual|        : " << rep.max_state_residual << "\n"
              << "max |adjoint residual|      : " << rep.max_adjoint_residual << "\n"
              << "max |optimality gap|        : " << rep.max_optimality_gap << "\n"
              << "tolerance                   : " << rep.tolerance
              << (rep.used_fd_laplacian ? " (finite-difference laplacians)" : "") << "\n"
              << (rep.pass ? "PASS" : "FAIL") << "\n";
    return rep.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "cpinn: " << e.what() << "\n";
    return 1;
  }
}

namespace {

bool selftest_derivatives() {
  RngStream rs(CounterRng(11).split("selftest"));
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 1 + static_cast<int>(rs.uniform(0, 4));
    const auto kind = rep % 2 ? ActivationKind::Tanh : ActivationKind::Sigmoid;
    auto net = init_mlp<double>({d, 12, 10, 1}, kind, 100 + rep);
    RngStream bs(CounterRng(rep).split("selftest-bias"));
    for (int l = 0; l < net.depth(); ++l)
      for (int q = 0; q < net.shape.widths[l + 1]; ++q)
        net.biases(l)[q] = bs.uniform(-0.3, 0.3);
    std::vector<double> x(d);
    for (auto& v : x) v = bs.uniform(-1, 1);
    const auto fe = eval_field(net, std::span<const double>(x));
    // FD cross-check
    const double h = 1e-4;
    double lap_fd = 0;
    std::vector<double> xp = x;
    for (int p = 0; p < d; ++p) {
      xp[p] = x[p] + h;
      const double fp = eval_field(net, std::span<const double>(xp)).value;
      xp[p] = x[p] - h;
      const double fm = eval_field(net, std::span<const double>(xp)).value;
      xp[p] = x[p];
      const double gfd = (fp - fm) / (2 * h);
      if (std::fabs(gfd - fe.gradient[p]) > 1e-6 * std::max(1.0, std::fabs(gfd))) return false;
      lap_fd += (fp - 2 * fe.value + fm) / (h * h);
    }
    if (std::fabs(lap_fd - fe.laplacian) > 1e-6 * std::max(1.0, std::fabs(fe.laplacian)))
      return false;
  }
  return true;
}

bool selftest_kernels() {
  auto net = init_mlp<double>({3, 14, 11, 1}, ActivationKind::Tanh, 5);
  RngStream rs(CounterRng(6).split("selftest-pts"));
  const std::size_t n = 64;
  std::vector<double> pts(n * 3);
  for (auto& v : pts) v = rs.uniform(-1.5, 1.5);
  for (const auto& name : available_kernel_names()) {
    const auto* k = find_kernel<double>(name);
    if (!k) return false;
    PackedPoints<double> pp(*k, pts, 3);
    std::vector<double> tape(k->tape_reals(net.shape)), scratch(k->scratch_reals(net.shape));
    const int W = k->width();
    std::vector<double> v(W), l(W), g(3 * W);
    for (std::size_t gi = 0; gi < pp.groups; ++gi) {
      k->forward_group(net.shape, net.params.data(), pp.group(gi), tape.data(), scratch.data(),
                       v.data(), g.data(), l.data());
      for (int j = 0; j < pp.valid_lanes(gi); ++j) {
        const std::size_t i = gi * W + j;
        const auto ref =
            eval_field(net, std::span<const double>(pts.data() + i * 3, 3));
        if (std::fabs(v[j] - ref.value) > 1e-11 * std::max(1.0, std::fabs(ref.value)))
          return false;
        if (std::fabs(l[j] - ref.laplacian) > 1e-10 * std::max(1.0, std::fabs(ref.laplacian)))
          return false;
      }
    }
  }
  return true;
}

bool selftest_bounds() {
  RngStream rs(CounterRng(21).split("selftest-bounds"));
  for (int rep = 0; rep < 100; ++rep) {
    const double R = rep % 2 ? 1.0 : 2.0;
    Mlp<double> net{MlpShape({2, 8, 6, 1}, rep % 2 ? ActivationKind::Tanh
                                                   : ActivationKind::Sigmoid)};
    for (auto& p : net.params) p = rs.uniform(-R, R);
    net.param_bound = R;
    const auto c = bound_certificate(net);
    for (int k = 0; k < 10; ++k) {
      std::vector<double> x{rs.uniform(-1, 1), rs.uniform(-1, 1)};
      const auto fe = eval_field(net, std::span<const double>(x));
      if (std::fabs(fe.value) > c.output_value_bound()) return false;
      for (double gg : fe.gradient)
        if (std::fabs(gg) > c.output_gradient_bound()) return false;
      if (std::fabs(fe.laplacian) > 2 * c.output_second_bound()) return false;
    }
  }
  return true;
}

bool selftest_geometry() {
  const auto [a, b] = measures(Domain::annulus(1, 3));
  if (std::fabs(a - 8 * 3.14159265358979323846) > 1e-12) return false;
  if (std::fabs(b - a) > 1e-12) return false;
  auto s = sample_boundary(Domain::annulus(1, 3), 1000, 3);
  for (std::size_t i = 0; i < s.n; ++i) {
    const double r = std::hypot(s.points[2 * i], s.points[2 * i + 1]);
    if (std::fabs(r - 1) > 1e-12 && std::fabs(r - 3) > 1e-12) return false;
  }
  return true;
}

bool selftest_problems() {
  for (const auto& name : problem_names())
    if (!verify_manufactured(load_problem(name), 200).pass) return false;
  return true;
}

}  // namespace

int run_selftest() {
  int failed = 0;
  const auto report = [&](const char* name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    if (!ok) ++failed;
  };
  std::cout << "kernels available:";
  for (const auto& n : available_kernel_names()) std::cout << ' ' << n;
  std::cout << "  (selected: " << select_kernel<double>().name() << ")\n";
  report("derivative oracle (value/gradient/laplacian vs finite differences)",
         selftest_derivatives());
  report("batched kernels match the scalar reference", selftest_kernels());
  report("derivative bound certificates hold on random networks", selftest_bounds());
  report("geometry measures and boundary membership", selftest_geometry());
  report("benchmark problems pass the consistency oracle", selftest_problems());
  return failed == 0 ? 0 : 1;
}

}  // namespace cpinn
