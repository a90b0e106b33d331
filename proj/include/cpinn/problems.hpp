#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpinn/geometry.hpp"

namespace cpinn {

using FieldFn = std::function<double(std::span<const double>)>;

// A scalar field closure with (optionally) its analytic Laplacian.
struct ScalarField {
  FieldFn value;
  FieldFn laplacian;  // empty = not available
  bool has_laplacian() const { return static_cast<bool>(laplacian); }
};

// Wraps a value-only field with a 5-point central-difference Laplacian.
ScalarField with_fd_laplacian(FieldFn value, int dim, double h = 1e-4);

// PDE operator: -lap(y) + c0*y + q(x, y) = f + u, with q and its first two
// y-derivatives (all zero for linear problems).
struct PdeSpec {
  double c0 = 0.0;
  std::function<double(std::span<const double>, double)> q;      // q(x, y)
  std::function<double(std::span<const double>, double)> q_dy;   // dq/dy
  std::function<double(std::span<const double>, double)> q_dyy;  // d2q/dy2
  bool linear() const { return !q; }

  double q_at(std::span<const double> x, double y) const { return q ? q(x, y) : 0.0; }
  double q_dy_at(std::span<const double> x, double y) const { return q_dy ? q_dy(x, y) : 0.0; }
  double q_dyy_at(std::span<const double> x, double y) const { return q_dyy ? q_dyy(x, y) : 0.0; }
};

// One optimal-control instance. Data closures (f, y_d, g) are always
// present; exact closures are present for benchmarks built by the
// manufactured-solution generator.
struct ProblemSpec {
  std::string name;
  Domain domain;
  PdeSpec pde;
  double lambda = 1.0;
  std::optional<std::pair<double, double>> bounds;  // (u_a, u_b), u_a < u_b

  FieldFn f;    // source
  FieldFn y_d;  // target
  FieldFn g;    // Dirichlet data for the state (adjoint data is 0)

  std::optional<ScalarField> exact_y;
  std::optional<ScalarField> exact_p;
  std::optional<ScalarField> exact_u;  // laplacian unused

  bool has_exact() const { return exact_y && exact_p && exact_u; }

  // -lambda^{-1} p, clamped into the box when bounds are present.
  double recover_control(double p_value) const;
};

// Builds KKT-consistent data from an exact state and a pre-projection
// control: p = -lambda*w, u = w (or the box projection of w),
//   f   = -lap(y) + c0*y + q(x, y) - u
//   y_d = y + lap(p) - c0*p - q_y(x, y)*p
//   g   = y on the boundary.
// Closures must carry analytic Laplacians unless allow_fd_fallback is set,
// in which case 5-point finite differences are substituted (verification
// tolerance loosens accordingly).
ProblemSpec manufacture_problem(const ScalarField& ybar, const ScalarField& w, double lambda,
                                const Domain& domain, const PdeSpec& pde,
                                std::optional<std::pair<double, double>> bounds,
                                bool allow_fd_fallback = false);

// Benchmark registry: ex1_annulus, ex2_annulus_box, ex3_hypercube4,
// ex4_semilinear. Unknown names raise with the list of valid ones.
ProblemSpec load_problem(const std::string& name);
std::vector<std::string> problem_names();

struct ConsistencyReport {
  double max_state_residual = 0.0;
  double max_adjoint_residual = 0.0;
  double max_optimality_gap = 0.0;
  double tolerance = 0.0;
  bool used_fd_laplacian = false;
  bool pass = false;
};

// Evaluates the three KKT residuals of the exact closures on grid_n random
// interior points. Guards against transcription errors in the closures.
ConsistencyReport verify_manufactured(const ProblemSpec& problem, std::size_t grid_n,
                                      std::uint64_t seed = 20240601);

// ---- closure families (used by the registry and by config-defined problems)

// exact-state families
ScalarField ybar_quadratic_radius();              // r^2 on the annulus (d=2)
ScalarField ybar_prod_sin(int dim);               // prod_i sin(pi x_i)
ScalarField ybar_exp_bump_sin();                  // e^{x1(1-x1)}sin(pi x2) + sym. (d=2)

// pre-projection control families
ScalarField control_ring_sin(double sign);        // sign*(r-1)(r-3)sin(theta) (d=2)
ScalarField control_state_multiple(const ScalarField& ybar, double factor);
ScalarField control_poly_cos(double scale);       // scale*x1x2(1+cos(pi x1))(1+cos(pi x2))

// semilinear family: q = k(x) y^3 with k = k_in on [0.25,0.75]^2 (closed
// box), k_out elsewhere
PdeSpec pde_cubic_subregion(double c0, double k_in, double k_out);

}  // namespace cpinn
