#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpinn/loss.hpp"
#include "cpinn/objectives.hpp"
#include "test_util.hpp"

using namespace cpinn;
using namespace cpinn::test;
using std::numbers::pi;

namespace {

template <class Obj>
std::vector<double> fd_objective_grad(Obj& obj, std::vector<double> theta, double h = 1e-6) {
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double v0 = theta[i];
    theta[i] = v0 + h;
    const double fp = obj.eval(theta, {});
    theta[i] = v0 - h;
    const double fm = obj.eval(theta, {});
    theta[i] = v0;
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

std::vector<double> concat(const Mlp<double>& a, const Mlp<double>& b) {
  std::vector<double> t(a.params);
  t.insert(t.end(), b.params.begin(), b.params.end());
  return t;
}

}  // namespace

TEST_CASE("project_control clamps and validates") {
  CHECK(project_control(1.0, -0.5, 0.7) == 0.7);
  CHECK(project_control(0.1, -0.5, 0.7) == 0.1);
  CHECK(project_control(-2.0, -0.5, 0.7) == -0.5);
  CHECK_THROWS_AS(project_control(0.0, 0.7, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(project_control(0.0, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("cpinn residuals vanish on exact closures of every benchmark") {
  for (const auto& name : problem_names()) {
    auto prob = load_problem(name);
    auto s = sample_interior(prob.domain, 300, 11);
    double scale = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) scale = std::max(scale, std::fabs(prob.f(s.point(i))));
    for (std::size_t i = 0; i < s.n; ++i) {
      const auto x = s.point(i);
      auto r = cpinn_residuals(prob, x, prob.exact_y->value(x), prob.exact_y->laplacian(x),
                               prob.exact_p->value(x), prob.exact_p->laplacian(x));
      CHECK(std::fabs(r.r_state) <= 1e-10 * std::max(1.0, scale));
      CHECK(std::fabs(r.r_adjoint) <= 1e-10 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("cpinn residuals of zero fields reduce to the data") {
  for (const auto& name : {"ex1_annulus", "ex2_annulus_box"}) {
    auto prob = load_problem(name);
    auto s = sample_interior(prob.domain, 50, 13);
    for (std::size_t i = 0; i < s.n; ++i) {
      const auto x = s.point(i);
      auto r = cpinn_residuals(prob, x, 0.0, 0.0, 0.0, 0.0);
      const double u0 = prob.bounds ? project_control(0.0, prob.bounds->first,
                                                      prob.bounds->second)
                                    : 0.0;
      CHECK(r.r_state == doctest::Approx(prob.f(x) + u0).epsilon(1e-13));
      CHECK(r.r_adjoint == doctest::Approx(-prob.y_d(x)).epsilon(1e-13));
    }
  }
}

TEST_CASE("exact-solution annihilation of the empirical loss on all benchmarks") {
  for (const auto& name : problem_names()) {
    auto prob = load_problem(name);
    auto interior = sample_interior(prob.domain, 800, 3);
    auto boundary = sample_boundary(prob.domain, 300, 4);
    auto w = LossWeights::defaults(prob.lambda, 5.0);
    auto b =
        empirical_loss_fields(prob, *prob.exact_y, *prob.exact_p, interior, boundary, w);
    // data scale: the zero-field loss
    ScalarField zero;
    zero.value = [](std::span<const double>) { return 0.0; };
    zero.laplacian = [](std::span<const double>) { return 0.0; };
    auto z = empirical_loss_fields(prob, zero, zero, interior, boundary, w);
    INFO(name, " exact loss=", b.total, " scale=", z.total);
    CHECK(b.total <= 1e-16 * std::max(1.0, z.total));
    CHECK(b.total == b.state_residual_term + b.adjoint_residual_term + b.boundary_y_term +
                         b.boundary_p_term);
  }
}

TEST_CASE("objective_J basics and measure convention") {
  auto square = Domain::hypercube(2);
  auto s = sample_interior(square, 5000, 17);
  FieldFn one = [](std::span<const double>) { return 1.0; };
  FieldFn two = [](std::span<const double>) { return 2.0; };
  FieldFn zero = [](std::span<const double>) { return 0.0; };
  // y == y_d, u == 0
  CHECK(objective_J(one, zero, s, one, 0.01) == 0.0);
  // y - y_d == 1, u == 2, lambda 0.01: exactly 0.5 + 0.02 (constant integrand)
  CHECK(objective_J(one, two, s, zero, 0.01) == doctest::Approx(0.52).epsilon(1e-12));
  CHECK_THROWS_AS((void)objective_J(one, two, sample_interior(square, 0, 3), zero, 0.01),
                  std::invalid_argument);
}

TEST_CASE("objective_J on exact benchmark solutions matches dense-grid integrals") {
  // independent dense-grid values: ex1 0.03668725 (annulus), ex4 16.3296
  {
    auto prob = load_problem("ex1_annulus");
    auto s = sample_interior(prob.domain, 200000, 23);
    const double J =
        objective_J(prob.exact_y->value, prob.exact_u->value, s, prob.y_d, prob.lambda);
    CHECK(J == doctest::Approx(0.0366873).epsilon(0.02));
  }
  {
    auto prob = load_problem("ex4_semilinear");
    auto s = sample_interior(prob.domain, 200000, 29);
    const double J =
        objective_J(prob.exact_y->value, prob.exact_u->value, s, prob.y_d, prob.lambda);
    CHECK(J == doctest::Approx(16.3296).epsilon(0.02));
  }
}

TEST_CASE("zero networks reproduce the direct quadrature of the data") {
  auto prob = load_problem("ex1_annulus");
  auto interior = sample_interior(prob.domain, 2000, 5);
  auto boundary = sample_boundary(prob.domain, 700, 6);
  auto w = LossWeights::defaults(prob.lambda, 5.0);
  Mlp<double> zy{MlpShape({2, 8, 1}, ActivationKind::Tanh)};
  Mlp<double> zp{MlpShape({2, 8, 1}, ActivationKind::Tanh)};
  auto b = empirical_loss(select_kernel<double>(), prob, zy, zp, interior, boundary, w);

  const double wi = interior.support_measure / interior.n;
  const double wb = boundary.support_measure / boundary.n;
  double sf = 0, syd = 0, sg = 0;
  for (std::size_t i = 0; i < interior.n; ++i) {
    const auto x = interior.point(i);
    sf += prob.f(x) * prob.f(x);
    syd += prob.y_d(x) * prob.y_d(x);
  }
  for (std::size_t j = 0; j < boundary.n; ++j) {
    const auto x = boundary.point(j);
    sg += prob.g(x) * prob.g(x);
  }
  CHECK(b.state_residual_term == doctest::Approx(wi * sf).epsilon(1e-11));
  CHECK(b.adjoint_residual_term ==
        doctest::Approx(w.alpha_interior * wi * syd).epsilon(1e-11));
  CHECK(b.boundary_y_term == doctest::Approx(w.alpha_boundary_y * wb * sg).epsilon(1e-11));
  CHECK(b.boundary_p_term == 0.0);
}

TEST_CASE("doubling the y boundary weight doubles exactly that term") {
  auto prob = load_problem("ex1_annulus");
  auto interior = sample_interior(prob.domain, 500, 7);
  auto boundary = sample_boundary(prob.domain, 200, 8);
  auto y = random_net({2, 10, 1}, ActivationKind::Tanh, 1);
  auto p = random_net({2, 10, 1}, ActivationKind::Tanh, 2);
  auto w = LossWeights::defaults(prob.lambda, 5.0);
  auto b1 = empirical_loss(select_kernel<double>(), prob, y, p, interior, boundary, w);
  auto w2 = w;
  w2.alpha_boundary_y *= 2.0;
  auto b2 = empirical_loss(select_kernel<double>(), prob, y, p, interior, boundary, w2);
  CHECK(b2.boundary_y_term == doctest::Approx(2 * b1.boundary_y_term).epsilon(1e-13));
  CHECK(b2.state_residual_term == b1.state_residual_term);
  CHECK(b2.adjoint_residual_term == b1.adjoint_residual_term);
  CHECK(b2.boundary_p_term == b1.boundary_p_term);
}

TEST_CASE("coupled objective matches a per-point reference recomputation") {
  for (const auto& name : {"ex1_annulus", "ex2_annulus_box", "ex4_semilinear"}) {
    auto prob = load_problem(name);
    auto interior = sample_interior(prob.domain, 600, 9);
    auto boundary = sample_boundary(prob.domain, 250, 10);
    auto w = LossWeights::defaults(prob.lambda, 5.0);
    auto y = random_net({prob.domain.dim, 12, 9, 1}, ActivationKind::Tanh, 100);
    auto p = random_net({prob.domain.dim, 11, 1}, ActivationKind::Tanh, 101);
    auto b = empirical_loss(select_kernel<double>(), prob, y, p, interior, boundary, w);

    const double wi = interior.support_measure / interior.n;
    const double wb = boundary.support_measure / boundary.n;
    double st = 0, at = 0, byt = 0, bpt = 0;
    for (std::size_t i = 0; i < interior.n; ++i) {
      const auto x = interior.point(i);
      auto fy = eval_field(y, x);
      auto fp = eval_field(p, x);
      auto r = cpinn_residuals(prob, x, fy, fp);
      st += wi * r.r_state * r.r_state;
      at += w.alpha_interior * wi * r.r_adjoint * r.r_adjoint;
    }
    for (std::size_t j = 0; j < boundary.n; ++j) {
      const auto x = boundary.point(j);
      const double ry = eval_field(y, x).value - prob.g(x);
      const double rp = eval_field(p, x).value;
      byt += w.alpha_boundary_y * wb * ry * ry;
      bpt += w.alpha_boundary_p * wb * rp * rp;
    }
    CHECK(close_mixed(b.state_residual_term, st, 1e-11));
    CHECK(close_mixed(b.adjoint_residual_term, at, 1e-11));
    CHECK(close_mixed(b.boundary_y_term, byt, 1e-11));
    CHECK(close_mixed(b.boundary_p_term, bpt, 1e-11));
  }
}

TEST_CASE("coupled objective gradient matches finite differences") {
  for (const auto& name : {"ex1_annulus", "ex2_annulus_box", "ex4_semilinear"}) {
    auto prob = load_problem(name);
    auto interior = sample_interior(prob.domain, 60, 19);
    auto boundary = sample_boundary(prob.domain, 30, 20);
    auto w = LossWeights::defaults(prob.lambda, 5.0);
    auto y = random_net({prob.domain.dim, 6, 1}, ActivationKind::Tanh, 200);
    auto p = random_net({prob.domain.dim, 5, 1}, ActivationKind::Tanh, 201);
    CpinnObjective<double> obj(select_kernel<double>(), prob, y.shape, p.shape, interior,
                               boundary, w);
    auto theta = concat(y, p);
    std::vector<double> grad(theta.size());
    obj.eval(theta, grad);
    auto fd = fd_objective_grad(obj, theta);
    INFO(name, " rel err = ", rel_l2(fd, grad));
    CHECK(rel_l2(fd, grad) < 1e-4);
  }
}

TEST_CASE("forward PINN loss: exact solution, alpha=0, zero-net quadrature") {
  auto prob = load_problem("ex4_semilinear");
  auto interior = sample_interior(prob.domain, 400, 21);
  auto boundary = sample_boundary(prob.domain, 150, 22);
  // exact state with exact control annihilates
  const double l0 =
      forward_pinn_loss_fields(prob, *prob.exact_y, prob.exact_u->value, interior, boundary, 7.0);
  ScalarField zero;
  zero.value = [](std::span<const double>) { return 0.0; };
  zero.laplacian = [](std::span<const double>) { return 0.0; };
  const double lz =
      forward_pinn_loss_fields(prob, zero, zero.value, interior, boundary, 7.0);
  CHECK(l0 <= 1e-16 * std::max(1.0, lz));
  // alpha = 0 drops the boundary term
  const double la =
      forward_pinn_loss_fields(prob, zero, zero.value, interior, boundary, 0.0);
  double sf = 0;
  for (std::size_t i = 0; i < interior.n; ++i) {
    const double fv = prob.f(interior.point(i));
    sf += fv * fv;
  }
  CHECK(la == doctest::Approx(interior.support_measure / interior.n * sf).epsilon(1e-11));
  CHECK(la < lz);
}

TEST_CASE("forward/adjoint solve objectives match finite differences") {
  auto prob = load_problem("ex4_semilinear");
  auto interior = sample_interior(prob.domain, 50, 23);
  auto boundary = sample_boundary(prob.domain, 25, 24);
  auto net = random_net({2, 6, 1}, ActivationKind::Tanh, 300);
  RngStream rs(CounterRng(44).split("fixed"));
  std::vector<double> fixed(interior.n);
  for (auto& v : fixed) v = rs.uniform(-1, 1);

  ForwardPinnObjective<double> state(select_kernel<double>(), prob, net.shape, interior,
                                     boundary, 5.0, ForwardPinnObjective<double>::Kind::State);
  state.set_fixed_values(fixed);
  std::vector<double> grad(net.param_count());
  state.eval(net.params, grad);
  CHECK(rel_l2(fd_objective_grad(state, net.params), grad) < 1e-4);

  ForwardPinnObjective<double> adj(select_kernel<double>(), prob, net.shape, interior, boundary,
                                   5.0, ForwardPinnObjective<double>::Kind::Adjoint);
  adj.set_fixed_values(fixed);
  adj.eval(net.params, grad);
  CHECK(rel_l2(fd_objective_grad(adj, net.params), grad) < 1e-4);
}

TEST_CASE("control fit objective: perfect targets give zero loss and gradient") {
  auto prob = load_problem("ex1_annulus");
  auto interior = sample_interior(prob.domain, 80, 25);
  auto net = random_net({2, 7, 1}, ActivationKind::Tanh, 400);
  ControlFitObjective<double> fit(select_kernel<double>(), prob.domain, net.shape, interior);
  ValueBatch<double> vb(select_kernel<double>(), interior.points, 2);
  fit.set_targets(vb.eval(net));
  std::vector<double> grad(net.param_count());
  const double loss = fit.eval(net.params, grad);
  CHECK(loss <= 1e-22);
  for (double g : grad) CHECK(std::fabs(g) <= 1e-11);
  // and the gradient is exact for random targets
  RngStream rs(CounterRng(45).split("targets"));
  std::vector<double> t(interior.n);
  for (auto& v : t) v = rs.uniform(-1, 1);
  fit.set_targets(t);
  fit.eval(net.params, grad);
  CHECK(rel_l2(fd_objective_grad(fit, net.params), grad) < 1e-5);
}

TEST_CASE("penalty objective (PM and ALM flavors) matches finite differences") {
  auto prob = load_problem("ex2_annulus_box");
  auto interior = sample_interior(prob.domain, 50, 27);
  auto boundary = sample_boundary(prob.domain, 25, 28);
  auto y = random_net({2, 6, 1}, ActivationKind::Tanh, 500);
  auto u = random_net({2, 5, 1}, ActivationKind::Tanh, 501);
  auto theta = concat(y, u);
  std::vector<double> grad(theta.size());

  PenaltyObjective<double> pm(select_kernel<double>(), prob, y.shape, u.shape, interior,
                              boundary, 5.0, /*with_multipliers=*/false);
  pm.set_mu(0.7);
  pm.set_mu_box(0.3);
  pm.eval(theta, grad);
  CHECK(rel_l2(fd_objective_grad(pm, theta), grad) < 1e-4);

  PenaltyObjective<double> alm(select_kernel<double>(), prob, y.shape, u.shape, interior,
                               boundary, 5.0, /*with_multipliers=*/true);
  alm.set_mu(0.5);
  alm.set_mu_box(0.2);
  // seed nonzero multipliers through one Uzawa update
  alm.eval(theta, {});
  alm.update_multipliers();
  alm.eval(theta, grad);
  CHECK(rel_l2(fd_objective_grad(alm, theta), grad) < 1e-4);
}

TEST_CASE("uzawa update leaves multipliers unchanged at zero residual") {
  auto prob = load_problem("ex1_annulus");
  auto interior = sample_interior(prob.domain, 40, 31);
  auto boundary = sample_boundary(prob.domain, 20, 32);
  auto y = random_net({2, 5, 1}, ActivationKind::Tanh, 600);
  auto u = random_net({2, 5, 1}, ActivationKind::Tanh, 601);
  PenaltyObjective<double> alm(select_kernel<double>(), prob, y.shape, u.shape, interior,
                               boundary, 5.0, true);
  alm.set_mu(0.4);
  alm.eval(concat(y, u), {});
  auto F = alm.last_state_residuals();
  // multipliers move by exactly mu * residual
  std::vector<double> before(alm.eta_d().begin(), alm.eta_d().end());
  alm.update_multipliers();
  for (std::size_t i = 0; i < F.size(); ++i)
    CHECK(alm.eta_d()[i] == doctest::Approx(before[i] + 0.4 * F[i]).epsilon(1e-13));
  CHECK(alm.eta_d().size() == interior.n);
  CHECK(alm.eta_b().size() == boundary.n);
}

TEST_CASE("objective values agree across kernels") {
  auto prob = load_problem("ex4_semilinear");
  auto interior = sample_interior(prob.domain, 300, 33);
  auto boundary = sample_boundary(prob.domain, 120, 34);
  auto w = LossWeights::defaults(prob.lambda, 100.0);
  auto y = random_net({2, 14, 10, 1}, ActivationKind::Tanh, 700);
  auto p = random_net({2, 14, 10, 1}, ActivationKind::Tanh, 701);
  auto theta = concat(y, p);
  double ref_total = 0;
  std::vector<double> ref_grad;
  bool first = true;
  for (const auto& name : available_kernel_names()) {
    CpinnObjective<double> obj(*find_kernel<double>(name), prob, y.shape, p.shape, interior,
                               boundary, w);
    std::vector<double> grad(theta.size());
    const double total = obj.eval(theta, grad);
    if (first) {
      ref_total = total;
      ref_grad = grad;
      first = false;
    } else {
      CHECK(close_mixed(total, ref_total, 1e-12));
      for (std::size_t i = 0; i < grad.size(); ++i) CHECK(close_mixed(grad[i], ref_grad[i], 1e-10));
    }
  }
}

TEST_CASE("empty collocation sets are structured errors") {
  auto prob = load_problem("ex1_annulus");
  auto interior = sample_interior(prob.domain, 10, 35);
  auto empty_i = sample_interior(prob.domain, 0, 35);
  auto boundary = sample_boundary(prob.domain, 10, 36);
  auto empty_b = sample_boundary(prob.domain, 0, 36);
  MlpShape sh({2, 4, 1}, ActivationKind::Tanh);
  auto w = LossWeights::defaults(prob.lambda, 5.0);
  CHECK_THROWS_AS(CpinnObjective<double>(select_kernel<double>(), prob, sh, sh, empty_i,
                                         boundary, w),
                  std::invalid_argument);
  CHECK_THROWS_AS(CpinnObjective<double>(select_kernel<double>(), prob, sh, sh, interior,
                                         empty_b, w),
                  std::invalid_argument);
}

TEST_CASE("smooth projection converges to the clamp and has exact derivatives") {
  for (double v : {-2.0, -0.5001, 0.1, 0.6999, 1.5}) {
    const auto [p3, d3] = smooth_project_control(v, -0.5, 0.7, 1e-3);
    CHECK(std::fabs(p3 - project_control(v, -0.5, 0.7)) < 5e-3);
    const double h = 1e-6;
    const auto [pp, dp] = smooth_project_control(v + h, -0.5, 0.7, 0.05);
    const auto [pm_, dm] = smooth_project_control(v - h, -0.5, 0.7, 0.05);
    const auto [p0, d0] = smooth_project_control(v, -0.5, 0.7, 0.05);
    CHECK(std::fabs((pp - pm_) / (2 * h) - d0) < 1e-6);
    (void)dp; (void)dm; (void)p0;
  }
  CHECK_THROWS_AS(smooth_project_control(0, 1, -1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(smooth_project_control(0, -1, 1, 0.0), std::invalid_argument);
}

TEST_CASE("coupled objective with smoothed projection matches finite differences") {
  auto prob = load_problem("ex2_annulus_box");
  auto interior = sample_interior(prob.domain, 50, 41);
  auto boundary = sample_boundary(prob.domain, 25, 42);
  auto w = LossWeights::defaults(prob.lambda, 5.0);
  auto y = random_net({2, 6, 1}, ActivationKind::Tanh, 800);
  auto p = random_net({2, 6, 1}, ActivationKind::Tanh, 801);
  CpinnObjective<double> obj(select_kernel<double>(), prob, y.shape, p.shape, interior,
                             boundary, w, /*smooth_delta=*/0.1);
  auto theta = concat(y, p);
  std::vector<double> grad(theta.size());
  obj.eval(theta, grad);
  CHECK(rel_l2(fd_objective_grad(obj, theta), grad) < 1e-4);
}
