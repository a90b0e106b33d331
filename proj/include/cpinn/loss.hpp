#pragma once

#include <span>

#include "cpinn/eval_ref.hpp"
#include "cpinn/problems.hpp"

namespace cpinn {

// Penalty weights of the coupled residual loss. Defaults follow the
// weak-coercivity scaling: alpha_interior = 1/lambda and
// alpha_boundary_p = alpha_interior * alpha_boundary_y.
struct LossWeights {
  double alpha_interior = 1.0;
  double alpha_boundary_y = 1.0;
  double alpha_boundary_p = 1.0;

  static LossWeights defaults(double lambda, double alpha_boundary_y) {
    LossWeights w;
    w.alpha_interior = 1.0 / lambda;
    w.alpha_boundary_y = alpha_boundary_y;
    w.alpha_boundary_p = w.alpha_interior * alpha_boundary_y;
    return w;
  }
};

struct LossBreakdown {
  double state_residual_term = 0.0;
  double adjoint_residual_term = 0.0;
  double boundary_y_term = 0.0;
  double boundary_p_term = 0.0;
  double total = 0.0;

  static LossBreakdown of(double s, double a, double by, double bp) {
    LossBreakdown b{s, a, by, bp, 0.0};
    b.total = s + a + by + bp;
    return b;
  }
};

// min(max(v, u_a), u_b); u_a >= u_b is a structured error.
double project_control(double v, double u_a, double u_b);

// Softplus-smoothed clamp with transition width delta > 0:
//   P(v) = v - delta*softplus((v-u_b)/delta) + delta*softplus((u_a-v)/delta)
// approaches the exact clamp as delta -> 0. Returns (value, dvalue/dv).
std::pair<double, double> smooth_project_control(double v, double u_a, double u_b, double delta);

struct ResidualPair {
  double r_state = 0.0;
  double r_adjoint = 0.0;
};

// Pointwise coupled residuals at x:
//   r_state   = lap y - c0 y - q(x,y) + f(x) + u_rec(p)
//   r_adjoint = lap p - c0 p - q_y(x,y) p + y - y_d(x)
// with u_rec = -p/lambda, clamped into the box for constrained problems.
ResidualPair cpinn_residuals(const ProblemSpec& problem, std::span<const double> x, double y_value,
                             double y_lap, double p_value, double p_lap);
ResidualPair cpinn_residuals(const ProblemSpec& problem, std::span<const double> x,
                             const FieldEval<double>& y, const FieldEval<double>& p);

// Empirical coupled loss evaluated on arbitrary twice-differentiable fields
// (the closure test hook: exact solutions plug straight in).
LossBreakdown empirical_loss_fields(const ProblemSpec& problem, const ScalarField& y,
                                    const ScalarField& p, const SampleSet& interior,
                                    const SampleSet& boundary, const LossWeights& weights);

// Forward PINN loss (|O|/n_d) sum F^2 + alpha (|dO|/n_b) sum (y-g)^2 on
// closures, F = lap y - c0 y - q(x,y) + f + u.
double forward_pinn_loss_fields(const ProblemSpec& problem, const ScalarField& y,
                                const FieldFn& u, const SampleSet& interior,
                                const SampleSet& boundary, double alpha);

// Monte Carlo objective (|O|/n_d) sum [ (y-y_d)^2/2 + lambda u^2/2 ].
double objective_J(const FieldFn& y, const FieldFn& u, const SampleSet& interior,
                   const FieldFn& y_d, double lambda);
double objective_J_values(std::span<const double> y_vals, std::span<const double> u_vals,
                          std::span<const double> yd_vals, double support_measure, double lambda);

}  // namespace cpinn
