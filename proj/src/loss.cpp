#include "cpinn/loss.hpp"

#include <stdexcept>
#include <string>

#include "cpinn/numerics.hpp"

namespace cpinn {

double project_control(double v, double u_a, double u_b) {
  if (!(u_a < u_b))
    throw std::invalid_argument("project_control needs u_a < u_b, got [" + std::to_string(u_a) +
                                ", " + std::to_string(u_b) + "]");
  return clamp(v, u_a, u_b);
}

std::pair<double, double> smooth_project_control(double v, double u_a, double u_b, double delta) {
  if (!(u_a < u_b))
    throw std::invalid_argument("smooth_project_control needs u_a < u_b");
  if (!(delta > 0.0)) throw std::invalid_argument("smooth_project_control needs delta > 0");
  auto softplus = [](double t) { return t > 30.0 ? t : std::log1p(std::exp(t)); };
  auto sigmoid = [](double t) { return 1.0 / (1.0 + std::exp(-t)); };
  const double hi = (v - u_b) / delta;
  const double lo = (u_a - v) / delta;
  const double value = v - delta * softplus(hi) + delta * softplus(lo);
  const double deriv = 1.0 - sigmoid(hi) - sigmoid(lo);
  return {value, deriv};
}

ResidualPair cpinn_residuals(const ProblemSpec& problem, std::span<const double> x, double y_value,
                             double y_lap, double p_value, double p_lap) {
  const auto& pde = problem.pde;
  ResidualPair r;
  const double u_rec = problem.recover_control(p_value);
  r.r_state = y_lap - pde.c0 * y_value - pde.q_at(x, y_value) + problem.f(x) + u_rec;
  r.r_adjoint =
      p_lap - pde.c0 * p_value - pde.q_dy_at(x, y_value) * p_value + y_value - problem.y_d(x);
  return r;
}

ResidualPair cpinn_residuals(const ProblemSpec& problem, std::span<const double> x,
                             const FieldEval<double>& y, const FieldEval<double>& p) {
  return cpinn_residuals(problem, x, y.value, y.laplacian, p.value, p.laplacian);
}

LossBreakdown empirical_loss_fields(const ProblemSpec& problem, const ScalarField& y,
                                    const ScalarField& p, const SampleSet& interior,
                                    const SampleSet& boundary, const LossWeights& weights) {
  if (interior.n == 0 || boundary.n == 0)
    throw std::invalid_argument("empirical loss needs nonempty interior and boundary sets");
  const double wi = interior.support_measure / static_cast<double>(interior.n);
  const double wb = boundary.support_measure / static_cast<double>(boundary.n);
  std::vector<double> st(interior.n), at(interior.n), by(boundary.n), bp(boundary.n);
  for (std::size_t i = 0; i < interior.n; ++i) {
    const auto x = interior.point(i);
    const auto r =
        cpinn_residuals(problem, x, y.value(x), y.laplacian(x), p.value(x), p.laplacian(x));
    st[i] = wi * r.r_state * r.r_state;
    at[i] = weights.alpha_interior * wi * r.r_adjoint * r.r_adjoint;
  }
  for (std::size_t j = 0; j < boundary.n; ++j) {
    const auto xb = boundary.point(j);
    const double ry = y.value(xb) - problem.g(xb);
    const double rp = p.value(xb);
    by[j] = weights.alpha_boundary_y * wb * ry * ry;
    bp[j] = weights.alpha_boundary_p * wb * rp * rp;
  }
  return LossBreakdown::of(pairwise_sum(st), pairwise_sum(at), pairwise_sum(by),
                           pairwise_sum(bp));
}

double forward_pinn_loss_fields(const ProblemSpec& problem, const ScalarField& y, const FieldFn& u,
                                const SampleSet& interior, const SampleSet& boundary,
                                double alpha) {
  if (interior.n == 0 || boundary.n == 0)
    throw std::invalid_argument("forward PINN loss needs nonempty interior and boundary sets");
  const double wi = interior.support_measure / static_cast<double>(interior.n);
  const double wb = boundary.support_measure / static_cast<double>(boundary.n);
  std::vector<double> res(interior.n), bd(boundary.n);
  for (std::size_t i = 0; i < interior.n; ++i) {
    const auto x = interior.point(i);
    const double yv = y.value(x);
    const double F =
        y.laplacian(x) - problem.pde.c0 * yv - problem.pde.q_at(x, yv) + problem.f(x) + u(x);
    res[i] = wi * F * F;
  }
  for (std::size_t j = 0; j < boundary.n; ++j) {
    const auto xb = boundary.point(j);
    const double ry = y.value(xb) - problem.g(xb);
    bd[j] = alpha * wb * ry * ry;
  }
  return pairwise_sum(res) + pairwise_sum(bd);
}

double objective_J_values(std::span<const double> y_vals, std::span<const double> u_vals,
                          std::span<const double> yd_vals, double support_measure, double lambda) {
  if (y_vals.empty()) throw std::invalid_argument("objective needs a nonempty interior set");
  std::vector<double> terms(y_vals.size());
  for (std::size_t i = 0; i < y_vals.size(); ++i) {
    const double dy = y_vals[i] - yd_vals[i];
    terms[i] = 0.5 * dy * dy + 0.5 * lambda * u_vals[i] * u_vals[i];
  }
  return support_measure / static_cast<double>(y_vals.size()) * pairwise_sum(terms);
}

double objective_J(const FieldFn& y, const FieldFn& u, const SampleSet& interior,
                   const FieldFn& y_d, double lambda) {
  if (interior.n == 0) throw std::invalid_argument("objective needs a nonempty interior set");
  std::vector<double> yv(interior.n), uv(interior.n), yd(interior.n);
  for (std::size_t i = 0; i < interior.n; ++i) {
    const auto x = interior.point(i);
    yv[i] = y(x);
    uv[i] = u(x);
    yd[i] = y_d(x);
  }
  return objective_J_values(yv, uv, yd, interior.support_measure, lambda);
}

}  // namespace cpinn
