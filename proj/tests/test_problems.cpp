#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpinn/problems.hpp"
#include "cpinn/rng.hpp"

using namespace cpinn;
using std::numbers::pi;

namespace {
std::vector<double> annulus_pt(double r, double th) { return {r * std::cos(th), r * std::sin(th)}; }
}  // namespace

TEST_CASE("registry contents and unknown-name error") {
  for (const auto& n : problem_names()) CHECK_NOTHROW((void)load_problem(n));
  CHECK_THROWS_WITH_AS((void)load_problem("nope"), doctest::Contains("ex1_annulus"),
                       std::invalid_argument);
}

TEST_CASE("every benchmark passes the consistency oracle at 1e-8") {
  for (const auto& n : problem_names()) {
    auto prob = load_problem(n);
    auto rep = verify_manufactured(prob, 400);
    INFO(n, " state=", rep.max_state_residual, " adjoint=", rep.max_adjoint_residual,
         " gap=", rep.max_optimality_gap);
    CHECK(rep.pass);
    CHECK(rep.max_state_residual <= 1e-10);
    CHECK(rep.max_adjoint_residual <= 1e-10);
    CHECK(rep.max_optimality_gap <= 1e-12);
  }
}

TEST_CASE("ex1: lambda, exact state and control, regenerated data") {
  auto prob = load_problem("ex1_annulus");
  CHECK(prob.lambda == 0.01);
  CHECK(!prob.bounds);
  auto x = annulus_pt(2.0, pi / 2);  // r=2, sin(theta)=1
  CHECK(prob.exact_y->value(x) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(prob.exact_u->value(x) == doctest::Approx(-1.0).epsilon(1e-13));
  // f = -4 - (r-1)(r-3)sin(theta); y_d = r^2 - 3*lambda*(1 - 1/r^2)*sin(theta)
  CHECK(prob.f(x) == doctest::Approx(-4.0 + 1.0).epsilon(1e-13));
  CHECK(prob.y_d(x) == doctest::Approx(4.0 - 0.03 * (1 - 0.25)).epsilon(1e-12));
  CHECK(prob.g(annulus_pt(3.0, 0.7)) == doctest::Approx(9.0).epsilon(1e-14));
}

TEST_CASE("ex1 with the printed source instead of the regenerated one fails the oracle") {
  auto prob = load_problem("ex1_annulus");
  prob.f = [](std::span<const double> x) {
    const double r = std::hypot(x[0], x[1]);
    return (r - 1.0) * (r - 3.0) * (x[1] / r) - 4.0;
  };
  auto rep = verify_manufactured(prob, 500);
  CHECK(!rep.pass);
  // residual is 2(r-1)(r-3)sin(theta), peak magnitude 2 at r=2
  CHECK(rep.max_state_residual > 1.0);
  CHECK(rep.max_state_residual < 2.0 + 1e-9);
  CHECK(rep.max_adjoint_residual <= 1e-10);
}

TEST_CASE("ex2: box bounds, feasible exact control, consistent printed source") {
  auto prob = load_problem("ex2_annulus_box");
  REQUIRE(prob.bounds.has_value());
  CHECK(prob.bounds->first == -0.5);
  CHECK(prob.bounds->second == 0.7);
  auto samples = sample_interior(prob.domain, 2000, 9);
  for (std::size_t i = 0; i < samples.n; ++i) {
    const double u = prob.exact_u->value(samples.point(i));
    CHECK(u >= -0.5);
    CHECK(u <= 0.7);
  }
  // the printed data f = -4 - P_[-0.5,0.7]((1-r)(r-3)sin) equals the
  // regenerated source exactly
  for (std::size_t i = 0; i < 200; ++i) {
    const auto x = samples.point(i);
    const double r = std::hypot(x[0], x[1]);
    const double w = (1.0 - r) * (r - 3.0) * (x[1] / r);
    const double printed = -4.0 - std::min(std::max(w, -0.5), 0.7);
    CHECK(prob.f(x) == doctest::Approx(printed).epsilon(1e-12));
  }
}

TEST_CASE("ex3: zero source and sign-flipped target perturbation") {
  auto prob = load_problem("ex3_hypercube4");
  CHECK(prob.domain.dim == 4);
  auto samples = sample_interior(prob.domain, 200, 4);
  const double coeff = 1.0 + 16.0 * prob.lambda * pi * pi * pi * pi;
  for (std::size_t i = 0; i < samples.n; ++i) {
    const auto x = samples.point(i);
    CHECK(std::fabs(prob.f(x)) <= 1e-11);  // f == 0 identically
    CHECK(prob.y_d(x) == doctest::Approx(coeff * prob.exact_y->value(x)).epsilon(1e-11));
    CHECK(prob.g(x) == doctest::Approx(prob.exact_y->value(x)).epsilon(1e-14));
  }
  // boundary data vanishes
  auto bd = sample_boundary(prob.domain, 100, 5);
  for (std::size_t i = 0; i < bd.n; ++i) CHECK(std::fabs(prob.g(bd.point(i))) <= 1e-14);
}

TEST_CASE("ex4: semilinear benchmark data") {
  auto prob = load_problem("ex4_semilinear");
  CHECK(prob.pde.c0 == 1.0);
  CHECK(!prob.pde.linear());
  // k(x): 1 on the closed subregion, 3 outside
  const std::vector<double> inside{0.5, 0.5}, edge{0.25, 0.75}, outside{0.1, 0.9};
  CHECK(prob.pde.q_at(inside, 2.0) == doctest::Approx(8.0));
  CHECK(prob.pde.q_at(edge, 2.0) == doctest::Approx(8.0));
  CHECK(prob.pde.q_at(outside, 2.0) == doctest::Approx(24.0));
  // control scale: u = -100 * x1 x2 (1+cos pi x1)(1+cos pi x2)
  const std::vector<double> x{0.5, 0.5};
  CHECK(prob.exact_u->value(x) == doctest::Approx(-100.0 * 0.25).epsilon(1e-13));
  // adjoint vanishes on the boundary (sanity for the boundary-p penalty)
  auto bd = sample_boundary(prob.domain, 500, 8);
  for (std::size_t i = 0; i < bd.n; ++i)
    CHECK(std::fabs(prob.exact_p->value(bd.point(i))) <= 1e-13);
}

TEST_CASE("semilinear derivatives match finite differences in y") {
  auto prob = load_problem("ex4_semilinear");
  RngStream rs(CounterRng(77).split("qfd"));
  for (int k = 0; k < 200; ++k) {
    const std::vector<double> x{rs.uniform(0, 1), rs.uniform(0, 1)};
    const double y = rs.uniform(-2, 2);
    const double h = 1e-6;
    const double fd1 = (prob.pde.q_at(x, y + h) - prob.pde.q_at(x, y - h)) / (2 * h);
    CHECK(std::fabs(fd1 - prob.pde.q_dy_at(x, y)) <=
          1e-6 * std::max(1.0, std::fabs(fd1)));
    const double fd2 = (prob.pde.q_dy_at(x, y + h) - prob.pde.q_dy_at(x, y - h)) / (2 * h);
    CHECK(std::fabs(fd2 - prob.pde.q_dyy_at(x, y)) <=
          1e-6 * std::max(1.0, std::fabs(fd2)));
  }
}

TEST_CASE("zero pre-projection control gives y_d = ybar and p = 0") {
  ScalarField zero;
  zero.value = [](std::span<const double>) { return 0.0; };
  zero.laplacian = [](std::span<const double>) { return 0.0; };
  auto prob = manufacture_problem(ybar_prod_sin(2), zero, 0.05, Domain::hypercube(2),
                                  PdeSpec{}, std::nullopt);
  auto s = sample_interior(prob.domain, 100, 2);
  for (std::size_t i = 0; i < s.n; ++i) {
    const auto x = s.point(i);
    CHECK(prob.y_d(x) == doctest::Approx(prob.exact_y->value(x)).epsilon(1e-14));
    CHECK(prob.exact_p->value(x) == 0.0);
    CHECK(prob.exact_u->value(x) == 0.0);
  }
}

TEST_CASE("missing analytic laplacian: hard error or finite-difference fallback") {
  ScalarField y_nolap;
  y_nolap.value = [](std::span<const double> x) { return std::sin(x[0]) * std::cos(x[1]); };
  ScalarField w = control_poly_cos(1.0);
  CHECK_THROWS_WITH_AS((void)manufacture_problem(y_nolap, w, 0.1, Domain::hypercube(2),
                                                 PdeSpec{}, std::nullopt),
                       doctest::Contains("fd_fallback"), std::invalid_argument);
  auto prob = manufacture_problem(y_nolap, w, 0.1, Domain::hypercube(2), PdeSpec{},
                                  std::nullopt, /*allow_fd_fallback=*/true);
  auto rep = verify_manufactured(prob, 200);
  CHECK(rep.used_fd_laplacian);
  CHECK(rep.tolerance == 1e-5);
  CHECK(rep.pass);
}

TEST_CASE("manufactured semilinear problem with bounds stays KKT-consistent") {
  auto prob = manufacture_problem(ybar_exp_bump_sin(), control_poly_cos(3.0), 0.5,
                                  Domain::unit_square_with_subregion(),
                                  pde_cubic_subregion(1.0, 1.0, 3.0),
                                  std::make_pair(-0.4, 0.6));
  auto rep = verify_manufactured(prob, 300);
  CHECK(rep.pass);
  auto s = sample_interior(prob.domain, 500, 3);
  for (std::size_t i = 0; i < s.n; ++i) {
    const double u = prob.exact_u->value(s.point(i));
    CHECK(u >= -0.4);
    CHECK(u <= 0.6);
  }
}
