#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cpinn/batch.hpp"
#include "cpinn/kernels.hpp"
#include "cpinn/metrics.hpp"
#include "cpinn/objectives.hpp"
#include "cpinn/optim.hpp"
#include "cpinn/solvers.hpp"
#include "test_util.hpp"

using namespace cpinn;
using namespace cpinn::test;

// Weak-coercivity trend: along a training trajectory, whenever the total
// loss drops by 10x or more, the squared relative errors of state, adjoint
// and control do not increase by more than 20%.
TEST_CASE("loss decrease controls the solution errors (monotone trend)") {
  auto prob = load_problem("ex1_annulus");
  auto interior = sample_interior(prob.domain, 1500, 71);
  auto boundary = sample_boundary(prob.domain, 500, 72);
  auto w = LossWeights::defaults(prob.lambda, 5.0);
  auto y = init_mlp<double>({2, 16, 16, 1}, ActivationKind::Tanh, 401);
  auto p = init_mlp<double>({2, 16, 16, 1}, ActivationKind::Tanh, 402);
  CpinnObjective<double> obj(select_kernel<double>(), prob, y.shape, p.shape, interior,
                             boundary, w);

  auto eval = sample_interior(prob.domain, 8000, 73);
  ValueBatch<double> vb(select_kernel<double>(), eval.points, 2);
  std::vector<double> ex_y(eval.n), ex_p(eval.n), ex_u(eval.n);
  for (std::size_t i = 0; i < eval.n; ++i) {
    ex_y[i] = prob.exact_y->value(eval.point(i));
    ex_p[i] = prob.exact_p->value(eval.point(i));
    ex_u[i] = prob.exact_u->value(eval.point(i));
  }
  const std::size_t ny = y.param_count();

  struct Snapshot {
    double loss, err2;
  };
  std::vector<Snapshot> snaps;
  auto measure = [&](std::span<const double> theta, double loss) {
    Mlp<double> yn = y, pn = p;
    yn.set_flat(theta.first(ny));
    pn.set_flat(theta.subspan(ny));
    auto yv = vb.eval(yn);
    auto pv = vb.eval(pn);
    std::vector<double> uv = pv;
    for (auto& v : uv) v = prob.recover_control(v);
    const double e2y = relative_error(yv, ex_y, ErrorNorm::L2);
    const double e2p = relative_error(pv, ex_p, ErrorNorm::L2);
    const double e2u = relative_error(uv, ex_u, ErrorNorm::L2);
    snaps.push_back({loss, e2y * e2y + e2p * e2p + e2u * e2u});
  };

  std::vector<double> theta(y.params);
  theta.insert(theta.end(), p.params.begin(), p.params.end());
  measure(theta, obj.eval(theta, {}));

  LossGradFn<double> fn = [&](std::span<const double> th, std::span<double> g) {
    return obj.eval(th, g);
  };
  LbfgsOptions opts;
  opts.max_iters = 500;
  opts.history = 30;
  IterCallback<double> on_iter = [&](long iter, double loss, std::span<const double> th) {
    if (iter % 25 == 0) measure(th, loss);
  };
  auto res = lbfgs_minimize(fn, theta, opts, on_iter);
  (void)res;
  REQUIRE(snaps.size() >= 8);
  REQUIRE(snaps.back().loss < 1e-3 * snaps.front().loss);

  int decade_pairs = 0;
  for (std::size_t i = 0; i < snaps.size(); ++i)
    for (std::size_t j = i + 1; j < snaps.size(); ++j)
      if (snaps[j].loss <= 0.1 * snaps[i].loss) {
        ++decade_pairs;
        CHECK(snaps[j].err2 <= 1.2 * snaps[i].err2);
      }
  CHECK(decade_pairs > 0);
}

// Independent-draw agreement at the loss level (statistical sanity at a
// scale smaller than the acceptance criterion).
TEST_CASE("empirical loss agrees across independent collocation draws") {
  auto prob = load_problem("ex4_semilinear");
  auto y = random_net({2, 12, 12, 1}, ActivationKind::Tanh, 21);
  auto p = random_net({2, 12, 12, 1}, ActivationKind::Tanh, 22);
  auto w = LossWeights::defaults(prob.lambda, 10.0);
  const auto& kernel = select_kernel<double>();
  auto a_int = sample_interior(prob.domain, 4000, 100);
  auto a_bd = sample_boundary(prob.domain, 1500, 101);
  auto b_int = sample_interior(prob.domain, 4000, 200);
  auto b_bd = sample_boundary(prob.domain, 1500, 201);
  const double la = empirical_loss(kernel, prob, y, p, a_int, a_bd, w).total;
  const double lb = empirical_loss(kernel, prob, y, p, b_int, b_bd, w).total;
  // crude scale check: within 25% of each other for smooth random nets
  CHECK(std::fabs(la - lb) <= 0.25 * std::max(la, lb));
}
