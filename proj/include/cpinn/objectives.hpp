#pragma once

#include <optional>

#include "cpinn/engine.hpp"
#include "cpinn/loss.hpp"

namespace cpinn {

// Pure-x problem data cached on the collocation sets (closures are evaluated
// once per solve, not per iteration).
struct ProblemArrays {
  std::vector<double> f, yd;  // interior
  std::vector<double> g;      // boundary
  double wi = 0.0, wb = 0.0;  // |O|/n_d, |dO|/n_b

  static ProblemArrays build(const ProblemSpec& problem, const SampleSet& interior,
                             const SampleSet& boundary) {
    ProblemArrays a;
    a.f.resize(interior.n);
    a.yd.resize(interior.n);
    for (std::size_t i = 0; i < interior.n; ++i) {
      const auto x = interior.point(i);
      a.f[i] = problem.f(x);
      a.yd[i] = problem.y_d(x);
    }
    a.g.resize(boundary.n);
    for (std::size_t j = 0; j < boundary.n; ++j) a.g[j] = problem.g(boundary.point(j));
    a.wi = interior.n ? interior.support_measure / static_cast<double>(interior.n) : 0.0;
    a.wb = boundary.n ? boundary.support_measure / static_cast<double>(boundary.n) : 0.0;
    return a;
  }
};

// Coupled residual loss over (theta_y | theta_p), differentiable in both.
template <class Real>
class CpinnObjective {
 public:
  CpinnObjective(const FieldKernel<Real>& kernel, const ProblemSpec& problem, MlpShape y_shape,
                 MlpShape p_shape, const SampleSet& interior, const SampleSet& boundary,
                 LossWeights weights, double smooth_delta = 0.0)
      : problem_(problem),
        weights_(weights),
        smooth_delta_(smooth_delta),
        arrays_(ProblemArrays::build(problem, interior, boundary)),
        ny_(y_shape.param_count),
        np_(p_shape.param_count),
        engine_(kernel, problem.domain.dim,
                {{y_shape, true, true}, {p_shape, true, true}}, interior.points,
                boundary.points, 2, 2) {
    if (interior.n == 0 || boundary.n == 0)
      throw std::invalid_argument("empirical loss needs nonempty interior and boundary sets");
    const int dim = problem_.domain.dim;
    interior_fn_ = [this, dim](std::size_t i, const double* xp,
                               const typename ObjectiveEngine<Real>::Fields* F, double* terms,
                               typename ObjectiveEngine<Real>::Cots* C) {
      const std::span<const double> x(xp, static_cast<std::size_t>(dim));
      const auto& pde = problem_.pde;
      const double yv = F[0].value, pv = F[1].value;
      double u_rec = -pv / problem_.lambda;
      double ind = 1.0;  // derivative of the projection at -p/lambda
      if (problem_.bounds) {
        const auto [ua, ub] = *problem_.bounds;
        if (smooth_delta_ > 0.0) {
          const auto [val, dv] = smooth_project_control(u_rec, ua, ub, smooth_delta_);
          u_rec = val;
          ind = dv;
        } else {
          if (u_rec < ua || u_rec > ub) ind = 0.0;
          u_rec = clamp(u_rec, ua, ub);
        }
      }
      const double qy = pde.q_dy_at(x, yv);
      const double r_s = F[0].lap - pde.c0 * yv - pde.q_at(x, yv) + arrays_.f[i] + u_rec;
      const double r_a = F[1].lap - pde.c0 * pv - qy * pv + yv - arrays_.yd[i];
      terms[0] = arrays_.wi * r_s * r_s;
      terms[1] = weights_.alpha_interior * arrays_.wi * r_a * r_a;
      if (C) {
        const double cs = 2.0 * arrays_.wi * r_s;
        const double ca = 2.0 * weights_.alpha_interior * arrays_.wi * r_a;
        const double dcoef = -pde.c0 - qy;
        C[0].v = cs * dcoef + ca * (1.0 - pde.q_dyy_at(x, yv) * pv);
        C[0].lap = cs;
        C[1].v = cs * (-ind / problem_.lambda) + ca * dcoef;
        C[1].lap = ca;
      }
    };
    boundary_fn_ = [this](std::size_t j, const double*, const double* V, double* terms,
                          double* C) {
      const double ry = V[0] - arrays_.g[j];
      terms[0] = weights_.alpha_boundary_y * arrays_.wb * ry * ry;
      terms[1] = weights_.alpha_boundary_p * arrays_.wb * V[1] * V[1];
      if (C) {
        C[0] = 2.0 * weights_.alpha_boundary_y * arrays_.wb * ry;
        C[1] = 2.0 * weights_.alpha_boundary_p * arrays_.wb * V[1];
      }
    };
  }

  std::size_t y_params() const { return ny_; }
  std::size_t p_params() const { return np_; }
  std::size_t n_params() const { return ny_ + np_; }

  double eval(std::span<const Real> theta, std::span<Real> grad) {
    check_sizes(theta, grad, n_params());
    auto res = engine_.evaluate({theta.data(), theta.data() + ny_}, !grad.empty(), interior_fn_,
                                boundary_fn_);
    breakdown_ = LossBreakdown::of(res.interior_terms[0], res.interior_terms[1],
                                   res.boundary_terms[0], res.boundary_terms[1]);
    if (!grad.empty()) {
      std::copy(res.grads[0].begin(), res.grads[0].end(), grad.begin());
      std::copy(res.grads[1].begin(), res.grads[1].end(), grad.begin() + ny_);
    }
    return breakdown_.total;
  }

  const LossBreakdown& last_breakdown() const { return breakdown_; }

  static void check_sizes(std::span<const Real> theta, std::span<Real> grad, std::size_t n) {
    if (theta.size() != n)
      throw std::invalid_argument("objective: parameter vector has wrong length");
    if (!grad.empty() && grad.size() != n)
      throw std::invalid_argument("objective: gradient buffer has wrong length");
  }

 private:
  ProblemSpec problem_;
  LossWeights weights_;
  double smooth_delta_ = 0.0;
  ProblemArrays arrays_;
  std::size_t ny_, np_;
  ObjectiveEngine<Real> engine_;
  typename ObjectiveEngine<Real>::InteriorFn interior_fn_;
  typename ObjectiveEngine<Real>::BoundaryFn boundary_fn_;
  LossBreakdown breakdown_;
};

// Single-field PINN loss for state or adjoint solves (AONN inner problems).
// The companion field (control u, or state y for the adjoint) is frozen as
// cached values on the interior points.
template <class Real>
class ForwardPinnObjective {
 public:
  enum class Kind { State, Adjoint };

  ForwardPinnObjective(const FieldKernel<Real>& kernel, const ProblemSpec& problem,
                       MlpShape shape, const SampleSet& interior, const SampleSet& boundary,
                       double alpha, Kind kind)
      : problem_(problem),
        alpha_(alpha),
        kind_(kind),
        arrays_(ProblemArrays::build(problem, interior, boundary)),
        fixed_(interior.n, 0.0),
        n_(shape.param_count),
        engine_(kernel, problem.domain.dim, {{shape, true, true}}, interior.points,
                boundary.points, 1, 1) {
    if (interior.n == 0 || boundary.n == 0)
      throw std::invalid_argument("forward PINN loss needs nonempty interior and boundary sets");
    const int dim = problem_.domain.dim;
    interior_fn_ = [this, dim](std::size_t i, const double* xp,
                               const typename ObjectiveEngine<Real>::Fields* F, double* terms,
                               typename ObjectiveEngine<Real>::Cots* C) {
      const std::span<const double> x(xp, static_cast<std::size_t>(dim));
      const auto& pde = problem_.pde;
      double r, dval;
      if (kind_ == Kind::State) {
        const double yv = F[0].value;
        r = F[0].lap - pde.c0 * yv - pde.q_at(x, yv) + arrays_.f[i] + fixed_[i];
        dval = -pde.c0 - pde.q_dy_at(x, yv);
      } else {
        const double pv = F[0].value;
        const double qy = pde.q_dy_at(x, fixed_[i]);
        r = F[0].lap - pde.c0 * pv - qy * pv + fixed_[i] - arrays_.yd[i];
        dval = -pde.c0 - qy;
      }
      terms[0] = arrays_.wi * r * r;
      if (C) {
        C[0].v = 2.0 * arrays_.wi * r * dval;
        C[0].lap = 2.0 * arrays_.wi * r;
      }
    };
    boundary_fn_ = [this](std::size_t j, const double*, const double* V, double* terms,
                          double* C) {
      // adjoint boundary data is homogeneous
      const double ry = V[0] - (kind_ == Kind::State ? arrays_.g[j] : 0.0);
      terms[0] = alpha_ * arrays_.wb * ry * ry;
      if (C) C[0] = 2.0 * alpha_ * arrays_.wb * ry;
    };
  }

  // State solves freeze u values; adjoint solves freeze y values.
  void set_fixed_values(std::span<const double> v) {
    if (v.size() != fixed_.size())
      throw std::invalid_argument("fixed-value array has wrong length");
    std::copy(v.begin(), v.end(), fixed_.begin());
  }

  std::size_t n_params() const { return n_; }

  double eval(std::span<const Real> theta, std::span<Real> grad) {
    CpinnObjective<Real>::check_sizes(theta, grad, n_);
    auto res = engine_.evaluate({theta.data()}, !grad.empty(), interior_fn_, boundary_fn_);
    residual_term_ = res.interior_terms[0];
    boundary_term_ = res.boundary_terms[0];
    if (!grad.empty()) std::copy(res.grads[0].begin(), res.grads[0].end(), grad.begin());
    return residual_term_ + boundary_term_;
  }

  double residual_term() const { return residual_term_; }
  double boundary_term() const { return boundary_term_; }

 private:
  ProblemSpec problem_;
  double alpha_;
  Kind kind_;
  ProblemArrays arrays_;
  std::vector<double> fixed_;
  std::size_t n_;
  ObjectiveEngine<Real> engine_;
  typename ObjectiveEngine<Real>::InteriorFn interior_fn_;
  typename ObjectiveEngine<Real>::BoundaryFn boundary_fn_;
  double residual_term_ = 0.0, boundary_term_ = 0.0;
};

// Least-squares fit of a value-only net to pointwise targets on the
// interior set (AONN control update).
template <class Real>
class ControlFitObjective {
 public:
  ControlFitObjective(const FieldKernel<Real>& kernel, const Domain& domain, MlpShape shape,
                      const SampleSet& interior)
      : targets_(interior.n, 0.0),
        wi_(interior.support_measure / static_cast<double>(interior.n)),
        n_(shape.param_count),
        engine_(kernel, domain.dim, {{shape, false, false}}, interior.points, {}, 1, 0) {
    interior_fn_ = [this](std::size_t i, const double*,
                          const typename ObjectiveEngine<Real>::Fields* F, double* terms,
                          typename ObjectiveEngine<Real>::Cots* C) {
      const double r = F[0].value - targets_[i];
      terms[0] = wi_ * r * r;
      if (C) C[0].v = 2.0 * wi_ * r;
    };
  }

  void set_targets(std::vector<double> t) {
    if (t.size() != targets_.size())
      throw std::invalid_argument("target array has wrong length");
    targets_ = std::move(t);
  }

  std::size_t n_params() const { return n_; }

  double eval(std::span<const Real> theta, std::span<Real> grad) {
    CpinnObjective<Real>::check_sizes(theta, grad, n_);
    auto res = engine_.evaluate({theta.data()}, !grad.empty(), interior_fn_, nullptr);
    if (!grad.empty()) std::copy(res.grads[0].begin(), res.grads[0].end(), grad.begin());
    return res.interior_terms[0];
  }

 private:
  std::vector<double> targets_;
  double wi_;
  std::size_t n_;
  ObjectiveEngine<Real> engine_;
  typename ObjectiveEngine<Real>::InteriorFn interior_fn_;
};

// Penalty / augmented-Lagrangian objective over (theta_y | theta_u):
//   J(y, u) + (mu/2) [ (|O|/n) sum F^2 + alpha (|dO|/n_b) sum (y-g)^2 ]
//   + (mu_box/2) (|O|/n) sum (u - P_U(u))^2            (box-constrained runs)
//   + (|O|/n) sum eta_d F + (|dO|/n_b) sum eta_b (y-g)  (ALM only)
// Pointwise multipliers live here; update_multipliers() applies the Uzawa
// step using the residuals of the latest evaluation.
template <class Real>
class PenaltyObjective {
 public:
  PenaltyObjective(const FieldKernel<Real>& kernel, const ProblemSpec& problem, MlpShape y_shape,
                   MlpShape u_shape, const SampleSet& interior, const SampleSet& boundary,
                   double alpha, bool with_multipliers)
      : problem_(problem),
        alpha_(alpha),
        with_multipliers_(with_multipliers),
        arrays_(ProblemArrays::build(problem, interior, boundary)),
        ny_(y_shape.param_count),
        nu_(u_shape.param_count),
        eta_d_(with_multipliers ? interior.n : 0, 0.0),
        eta_b_(with_multipliers ? boundary.n : 0, 0.0),
        last_F_(interior.n, 0.0),
        last_bdry_(boundary.n, 0.0),
        engine_(kernel, problem.domain.dim, {{y_shape, true, true}, {u_shape, false, false}},
                interior.points, boundary.points, 5, 3) {
    if (interior.n == 0 || boundary.n == 0)
      throw std::invalid_argument("penalty loss needs nonempty interior and boundary sets");
    const int dim = problem_.domain.dim;
    interior_fn_ = [this, dim](std::size_t i, const double* xp,
                               const typename ObjectiveEngine<Real>::Fields* F, double* terms,
                               typename ObjectiveEngine<Real>::Cots* C) {
      const std::span<const double> x(xp, static_cast<std::size_t>(dim));
      const auto& pde = problem_.pde;
      const double yv = F[0].value, uv = F[1].value;
      const double qy = pde.q_dy_at(x, yv);
      const double Fr = F[0].lap - pde.c0 * yv - pde.q_at(x, yv) + arrays_.f[i] + uv;
      last_F_[i] = Fr;
      const double dy = yv - arrays_.yd[i];
      const double eta = with_multipliers_ ? eta_d_[i] : 0.0;
      terms[0] = arrays_.wi * 0.5 * dy * dy;                          // J_y
      terms[1] = arrays_.wi * 0.5 * problem_.lambda * uv * uv;        // J_u
      terms[2] = 0.5 * mu_ * arrays_.wi * Fr * Fr;                    // PDE penalty
      double box_viol = 0.0;
      if (problem_.bounds) {
        box_viol = uv - clamp(uv, problem_.bounds->first, problem_.bounds->second);
        terms[3] = 0.5 * mu_box_ * arrays_.wi * box_viol * box_viol;  // box penalty
      }
      terms[4] = arrays_.wi * eta * Fr;                               // multiplier term
      if (C) {
        const double dref = mu_ * Fr + eta;
        const double dvalF = -pde.c0 - qy;
        C[0].v = arrays_.wi * (dy + dref * dvalF);
        C[0].lap = arrays_.wi * dref;
        C[1].v = arrays_.wi * (problem_.lambda * uv + dref + mu_box_ * box_viol);
      }
    };
    boundary_fn_ = [this](std::size_t j, const double*, const double* V, double* terms,
                          double* C) {
      const double ry = V[0] - arrays_.g[j];
      last_bdry_[j] = ry;
      const double eta = with_multipliers_ ? eta_b_[j] : 0.0;
      terms[0] = 0.5 * mu_ * alpha_ * arrays_.wb * ry * ry;
      terms[1] = arrays_.wb * eta * ry;
      terms[2] = arrays_.wb * ry * ry;  // diagnostic: unweighted boundary MS
      if (C) C[0] = mu_ * alpha_ * arrays_.wb * ry + arrays_.wb * eta;
    };
  }

  void set_mu(double mu) { mu_ = mu; }
  void set_mu_box(double mu_box) { mu_box_ = mu_box; }
  double mu() const { return mu_; }

  std::size_t y_params() const { return ny_; }
  std::size_t u_params() const { return nu_; }
  std::size_t n_params() const { return ny_ + nu_; }

  double eval(std::span<const Real> theta, std::span<Real> grad) {
    CpinnObjective<Real>::check_sizes(theta, grad, n_params());
    auto res = engine_.evaluate({theta.data(), theta.data() + ny_}, !grad.empty(), interior_fn_,
                                boundary_fn_);
    J_ = res.interior_terms[0] + res.interior_terms[1];
    pde_penalty_ = res.interior_terms[2] + res.boundary_terms[0];
    box_penalty_ = res.interior_terms[3];
    multiplier_term_ = res.interior_terms[4] + res.boundary_terms[1];
    state_residual_ms_ = res.interior_terms[2] / std::max(0.5 * mu_, 1e-300);
    boundary_ms_ = res.boundary_terms[2];
    if (!grad.empty()) {
      std::copy(res.grads[0].begin(), res.grads[0].end(), grad.begin());
      std::copy(res.grads[1].begin(), res.grads[1].end(), grad.begin() + ny_);
    }
    return J_ + pde_penalty_ + box_penalty_ + multiplier_term_;
  }

  // Uzawa step on the residuals of the latest eval():
  //   eta_d += mu F,  eta_b += mu alpha (y - g).
  // Optional safeguard clips |eta| at the given bound (0 = off).
  void update_multipliers(double clip = 0.0) {
    for (std::size_t i = 0; i < eta_d_.size(); ++i) {
      eta_d_[i] += mu_ * last_F_[i];
      if (clip > 0.0) eta_d_[i] = clamp(eta_d_[i], -clip, clip);
    }
    for (std::size_t j = 0; j < eta_b_.size(); ++j) {
      eta_b_[j] += mu_ * alpha_ * last_bdry_[j];
      if (clip > 0.0) eta_b_[j] = clamp(eta_b_[j], -clip, clip);
    }
  }

  std::span<const double> eta_d() const { return eta_d_; }
  std::span<const double> eta_b() const { return eta_b_; }
  std::span<const double> last_state_residuals() const { return last_F_; }
  double last_J() const { return J_; }
  double state_residual_ms() const { return state_residual_ms_; }
  double boundary_ms() const { return boundary_ms_; }

 private:
  ProblemSpec problem_;
  double alpha_;
  bool with_multipliers_;
  ProblemArrays arrays_;
  std::size_t ny_, nu_;
  double mu_ = 1.0, mu_box_ = 0.0;
  std::vector<double> eta_d_, eta_b_, last_F_, last_bdry_;
  ObjectiveEngine<Real> engine_;
  typename ObjectiveEngine<Real>::InteriorFn interior_fn_;
  typename ObjectiveEngine<Real>::BoundaryFn boundary_fn_;
  double J_ = 0.0, pde_penalty_ = 0.0, box_penalty_ = 0.0, multiplier_term_ = 0.0;
  double state_residual_ms_ = 0.0, boundary_ms_ = 0.0;
};

// Convenience wrapper: the coupled loss of two concrete networks on fixed
// collocation sets.
template <class Real>
LossBreakdown empirical_loss(const FieldKernel<Real>& kernel, const ProblemSpec& problem,
                             const Mlp<Real>& y_net, const Mlp<Real>& p_net,
                             const SampleSet& interior, const SampleSet& boundary,
                             const LossWeights& weights) {
  CpinnObjective<Real> obj(kernel, problem, y_net.shape, p_net.shape, interior, boundary,
                           weights);
  std::vector<Real> theta;
  theta.reserve(obj.n_params());
  theta.insert(theta.end(), y_net.params.begin(), y_net.params.end());
  theta.insert(theta.end(), p_net.params.begin(), p_net.params.end());
  obj.eval(theta, {});
  return obj.last_breakdown();
}

}  // namespace cpinn
