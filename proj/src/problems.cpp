#include "cpinn/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cpinn/numerics.hpp"
#include "cpinn/rng.hpp"

namespace cpinn {

using std::numbers::pi;

ScalarField with_fd_laplacian(FieldFn value, int dim, double h) {
  ScalarField out;
  out.value = value;
  out.laplacian = [value, dim, h](std::span<const double> x) {
    std::vector<double> xp(x.begin(), x.end());
    double lap = 0.0;
    for (int c = 0; c < dim; ++c) {
      const double x0 = xp[c];
      xp[c] = x0 + 2 * h;
      const double f2p = value(xp);
      xp[c] = x0 + h;
      const double f1p = value(xp);
      xp[c] = x0 - h;
      const double f1m = value(xp);
      xp[c] = x0 - 2 * h;
      const double f2m = value(xp);
      xp[c] = x0;
      const double f0 = value(xp);
      lap += (-f2p + 16 * f1p - 30 * f0 + 16 * f1m - f2m) / (12 * h * h);
    }
    return lap;
  };
  return out;
}

double ProblemSpec::recover_control(double p_value) const {
  const double v = -p_value / lambda;
  if (!bounds) return v;
  return clamp(v, bounds->first, bounds->second);
}

ProblemSpec manufacture_problem(const ScalarField& ybar, const ScalarField& w, double lambda,
                                const Domain& domain, const PdeSpec& pde,
                                std::optional<std::pair<double, double>> bounds,
                                bool allow_fd_fallback) {
  if (bounds && !(bounds->first < bounds->second))
    throw std::invalid_argument("control bounds need u_a < u_b");
  ScalarField y = ybar, ww = w;
  bool fd = false;
  if (!y.has_laplacian() || !ww.has_laplacian()) {
    if (!allow_fd_fallback)
      throw std::invalid_argument(
          "manufacture_problem: closure lacks an analytic Laplacian; pass "
          "allow_fd_fallback=true to substitute finite differences");
    fd = true;
    if (!y.has_laplacian()) y = with_fd_laplacian(y.value, domain.dim);
    if (!ww.has_laplacian()) ww = with_fd_laplacian(ww.value, domain.dim);
  }

  ProblemSpec prob;
  prob.domain = domain;
  prob.pde = pde;
  prob.lambda = lambda;
  prob.bounds = bounds;

  const PdeSpec op = pde;
  const double la = lambda;

  ScalarField u;
  if (bounds) {
    const double ua = bounds->first, ub = bounds->second;
    u.value = [wv = ww.value, ua, ub](std::span<const double> x) {
      return clamp(wv(x), ua, ub);
    };
  } else {
    u.value = ww.value;
  }

  ScalarField p;
  p.value = [wv = ww.value, la](std::span<const double> x) { return -la * wv(x); };
  p.laplacian = [wl = ww.laplacian, la](std::span<const double> x) { return -la * wl(x); };

  prob.f = [y, op, uv = u.value](std::span<const double> x) {
    const double yv = y.value(x);
    return -y.laplacian(x) + op.c0 * yv + op.q_at(x, yv) - uv(x);
  };
  prob.y_d = [y, p, op](std::span<const double> x) {
    const double yv = y.value(x);
    const double pv = p.value(x);
    return yv + p.laplacian(x) - op.c0 * pv - op.q_dy_at(x, yv) * pv;
  };
  prob.g = y.value;

  prob.exact_y = y;
  prob.exact_p = p;
  prob.exact_u = u;
  prob.name = fd ? "manufactured_fd" : "manufactured";
  return prob;
}

// ------------------------------------------------------------- families --

ScalarField ybar_quadratic_radius() {
  ScalarField f;
  f.value = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  f.laplacian = [](std::span<const double>) { return 4.0; };
  return f;
}

ScalarField ybar_prod_sin(int dim) {
  ScalarField f;
  f.value = [dim](std::span<const double> x) {
    double v = 1.0;
    for (int c = 0; c < dim; ++c) v *= std::sin(pi * x[c]);
    return v;
  };
  f.laplacian = [dim, val = f.value](std::span<const double> x) {
    return -static_cast<double>(dim) * pi * pi * val(x);
  };
  return f;
}

ScalarField ybar_exp_bump_sin() {
  // e^{x1(1-x1)} sin(pi x2) + e^{x2(1-x2)} sin(pi x1)
  auto bump = [](double t) { return std::exp(t * (1.0 - t)); };
  auto bump_dd = [bump](double t) {
    const double s = 1.0 - 2.0 * t;
    return (s * s - 2.0) * bump(t);
  };
  ScalarField f;
  f.value = [bump](std::span<const double> x) {
    return bump(x[0]) * std::sin(pi * x[1]) + bump(x[1]) * std::sin(pi * x[0]);
  };
  f.laplacian = [bump, bump_dd](std::span<const double> x) {
    const double t1 = (bump_dd(x[0]) - pi * pi * bump(x[0])) * std::sin(pi * x[1]);
    const double t2 = (bump_dd(x[1]) - pi * pi * bump(x[1])) * std::sin(pi * x[0]);
    return t1 + t2;
  };
  return f;
}

ScalarField control_ring_sin(double sign) {
  // sign * (r-1)(r-3) sin(theta); Laplacian sign * (3 - 3/r^2) sin(theta)
  ScalarField f;
  f.value = [sign](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    const double sin_th = x[1] / r;
    return sign * (r - 1.0) * (r - 3.0) * sin_th;
  };
  f.laplacian = [sign](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    const double sin_th = x[1] / r;
    return sign * (3.0 - 3.0 / (r * r)) * sin_th;
  };
  return f;
}

ScalarField control_state_multiple(const ScalarField& ybar, double factor) {
  ScalarField f;
  f.value = [v = ybar.value, factor](std::span<const double> x) { return factor * v(x); };
  if (ybar.has_laplacian())
    f.laplacian = [l = ybar.laplacian, factor](std::span<const double> x) {
      return factor * l(x);
    };
  return f;
}

ScalarField control_poly_cos(double scale) {
  // scale * h(x1) h(x2), h(t) = t(1 + cos(pi t)); vanishes on the unit
  // square's whole boundary.
  auto h = [](double t) { return t * (1.0 + std::cos(pi * t)); };
  auto hdd = [](double t) {
    return -2.0 * pi * std::sin(pi * t) - pi * pi * t * std::cos(pi * t);
  };
  ScalarField f;
  f.value = [h, scale](std::span<const double> x) { return scale * h(x[0]) * h(x[1]); };
  f.laplacian = [h, hdd, scale](std::span<const double> x) {
    return scale * (hdd(x[0]) * h(x[1]) + h(x[0]) * hdd(x[1]));
  };
  return f;
}

PdeSpec pde_cubic_subregion(double c0, double k_in, double k_out) {
  auto k = [k_in, k_out](std::span<const double> x) {
    const bool inside = x[0] >= 0.25 && x[0] <= 0.75 && x[1] >= 0.25 && x[1] <= 0.75;
    return inside ? k_in : k_out;
  };
  PdeSpec pde;
  pde.c0 = c0;
  pde.q = [k](std::span<const double> x, double y) { return k(x) * y * y * y; };
  pde.q_dy = [k](std::span<const double> x, double y) { return 3.0 * k(x) * y * y; };
  pde.q_dyy = [k](std::span<const double> x, double y) { return 6.0 * k(x) * y; };
  return pde;
}

// ------------------------------------------------------------- registry --

std::vector<std::string> problem_names() {
  return {"ex1_annulus", "ex2_annulus_box", "ex3_hypercube4", "ex4_semilinear"};
}

ProblemSpec load_problem(const std::string& name) {
  const double lambda = 0.01;
  ProblemSpec prob;
  if (name == "ex1_annulus") {
    prob = manufacture_problem(ybar_quadratic_radius(), control_ring_sin(+1.0), lambda,
                               Domain::annulus(1, 3), PdeSpec{}, std::nullopt);
  } else if (name == "ex2_annulus_box") {
    prob = manufacture_problem(ybar_quadratic_radius(), control_ring_sin(-1.0), lambda,
                               Domain::annulus(1, 3), PdeSpec{},
                               std::make_pair(-0.5, 0.7));
  } else if (name == "ex3_hypercube4") {
    const ScalarField y = ybar_prod_sin(4);
    prob = manufacture_problem(y, control_state_multiple(y, 4.0 * pi * pi), lambda,
                               Domain::hypercube(4), PdeSpec{}, std::nullopt);
  } else if (name == "ex4_semilinear") {
    prob = manufacture_problem(ybar_exp_bump_sin(), control_poly_cos(-1.0 / lambda), lambda,
                               Domain::unit_square_with_subregion(),
                               pde_cubic_subregion(1.0, 1.0, 3.0), std::nullopt);
  } else {
    std::string msg = "unknown problem '" + name + "'; available:";
    for (const auto& n : problem_names()) msg += " " + n;
    throw std::invalid_argument(msg);
  }
  prob.name = name;
  return prob;
}

ConsistencyReport verify_manufactured(const ProblemSpec& problem, std::size_t grid_n,
                                      std::uint64_t seed) {
  if (!problem.has_exact())
    throw std::invalid_argument("verify_manufactured needs exact closures");
  ConsistencyReport rep;
  rep.used_fd_laplacian = problem.name == "manufactured_fd";
  rep.tolerance = rep.used_fd_laplacian ? 1e-5 : 1e-8;
  const SampleSet grid = sample_interior(problem.domain, grid_n, seed);
  const auto& y = *problem.exact_y;
  const auto& p = *problem.exact_p;
  const auto& u = *problem.exact_u;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const auto x = grid.point(i);
    const double yv = y.value(x);
    const double pv = p.value(x);
    const double uv = u.value(x);
    const double state =
        problem.f(x) + uv - (-y.laplacian(x) + problem.pde.c0 * yv + problem.pde.q_at(x, yv));
    const double adjoint = (yv - problem.y_d(x)) -
                           (-p.laplacian(x) + problem.pde.c0 * pv +
                            problem.pde.q_dy_at(x, yv) * pv);
    const double gap = uv - problem.recover_control(pv);
    rep.max_state_residual = std::max(rep.max_state_residual, std::fabs(state));
    rep.max_adjoint_residual = std::max(rep.max_adjoint_residual, std::fabs(adjoint));
    rep.max_optimality_gap = std::max(rep.max_optimality_gap, std::fabs(gap));
  }
  rep.pass = rep.max_state_residual <= rep.tolerance &&
             rep.max_adjoint_residual <= rep.tolerance &&
             rep.max_optimality_gap <= rep.tolerance;
  return rep;
}

}  // namespace cpinn
