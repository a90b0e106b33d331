#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cpinn {

// Raised when an optimizer meets a non-finite loss or gradient; carries the
// iteration index so solvers can checkpoint the last good iterate.
struct OptimError : std::runtime_error {
  long iteration;
  OptimError(const std::string& what, long iter) : std::runtime_error(what), iteration(iter) {}
};

// loss_and_grad(theta, grad_out) -> loss; grad_out may be empty (loss only).
template <class Real>
using LossGradFn = std::function<double(std::span<const Real>, std::span<Real>)>;

// iteration callback: (iteration index starting at 1, loss, parameters)
template <class Real>
using IterCallback = std::function<void(long, double, std::span<const Real>)>;

// ----------------------------------------------------------------- Adam --

template <class Real>
struct AdamState {
  std::vector<Real> m, v;  // first/second moments
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  std::vector<long> milestones;  // divide lr by 10 after completing each

  explicit AdamState(std::size_t n, double lr_ = 1e-3, std::vector<long> ms = {})
      : m(n, Real(0)), v(n, Real(0)), lr(lr_), milestones(std::move(ms)) {}

  // effective rate at 1-based step t: lr * 0.1^{#milestones < t}
  double lr_at(long t) const {
    double r = lr;
    for (long ms : milestones)
      if (ms < t) r *= 0.1;
    return r;
  }
};

template <class Real>
void adam_step(AdamState<Real>& st, std::span<Real> theta, std::span<const Real> grad) {
  if (theta.size() != st.m.size() || grad.size() != st.m.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  for (Real g : grad)
    if (!std::isfinite(static_cast<double>(g)))
      throw OptimError("non-finite gradient in adam step " + std::to_string(st.step + 1),
                       st.step + 1);
  st.step += 1;
  const double t = static_cast<double>(st.step);
  const double rate = st.lr_at(st.step);
  const double bc1 = 1.0 - std::pow(st.beta1, t);
  const double bc2 = 1.0 - std::pow(st.beta2, t);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double g = static_cast<double>(grad[i]);
    const double m = st.beta1 * static_cast<double>(st.m[i]) + (1.0 - st.beta1) * g;
    const double v = st.beta2 * static_cast<double>(st.v[i]) + (1.0 - st.beta2) * g * g;
    st.m[i] = static_cast<Real>(m);
    st.v[i] = static_cast<Real>(v);
    const double mh = m / bc1;
    const double vh = v / bc2;
    theta[i] = static_cast<Real>(static_cast<double>(theta[i]) -
                                 rate * mh / (std::sqrt(vh) + st.eps));
  }
}

struct AdamRunOptions {
  long iters = 1000;
  double lr = 1e-3;
  std::vector<long> milestones;
};

template <class Real>
struct OptimRunResult {
  std::vector<Real> theta;
  std::vector<double> loss_history;  // one entry per iteration
  double final_loss = 0.0;
  long evals = 0;
  std::string status;  // "max_iters" | "grad_tol" | "stagnated"
};

template <class Real>
OptimRunResult<Real> adam_minimize(const LossGradFn<Real>& fn, std::vector<Real> theta,
                                   const AdamRunOptions& opts,
                                   const IterCallback<Real>& on_iter = {}) {
  OptimRunResult<Real> out;
  AdamState<Real> st(theta.size(), opts.lr, opts.milestones);
  std::vector<Real> grad(theta.size());
  out.loss_history.reserve(opts.iters);
  double loss = 0.0;
  for (long k = 1; k <= opts.iters; ++k) {
    loss = fn(theta, grad);
    ++out.evals;
    if (!std::isfinite(loss)) throw OptimError("non-finite loss in adam step", k);
    adam_step(st, std::span<Real>(theta), std::span<const Real>(grad));
    out.loss_history.push_back(loss);
    if (on_iter) on_iter(k, loss, theta);
  }
  out.theta = std::move(theta);
  out.final_loss = loss;
  out.status = "max_iters";
  return out;
}

// --------------------------------------------------- L-BFGS, strong Wolfe --

struct LbfgsOptions {
  long max_iters = 1000;
  int history = 10;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 25;
  double grad_tol = 1e-10;
};

struct LbfgsIterRecord {
  double loss = 0.0;
  double step = 0.0;
  double grad_norm = 0.0;
  int evals = 0;
  bool wolfe_ok = false;
};

template <class Real>
struct LbfgsResult {
  std::vector<Real> theta;
  std::vector<LbfgsIterRecord> trace;
  double final_loss = 0.0;
  double final_grad_norm = 0.0;
  long evals = 0;
  std::string status;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// cubic minimizer on [a_lo, a_hi] from values/derivatives at the endpoints;
// falls back to bisection when the cubic is degenerate or leaves the bracket
inline double cubic_step(double a_lo, double f_lo, double g_lo, double a_hi, double f_hi,
                         double g_hi) {
  const double d1 = g_lo + g_hi - 3.0 * (f_lo - f_hi) / (a_lo - a_hi);
  const double disc = d1 * d1 - g_lo * g_hi;
  const double mid = 0.5 * (a_lo + a_hi);
  if (!(disc > 0.0)) return mid;
  const double d2 = (a_hi > a_lo ? 1.0 : -1.0) * std::sqrt(disc);
  double a = a_hi - (a_hi - a_lo) * (g_hi + d2 - d1) / (g_hi - g_lo + 2.0 * d2);
  const double lo = std::min(a_lo, a_hi), hi = std::max(a_lo, a_hi);
  const double margin = 0.1 * (hi - lo);
  if (!std::isfinite(a) || a < lo + margin * 0.0 || a > hi || a < lo) return mid;
  if (a < lo + 1e-3 * (hi - lo) || a > hi - 1e-3 * (hi - lo)) return mid;
  return a;
}

}  // namespace detail

// Limited-memory BFGS with two-loop recursion and a strong-Wolfe cubic
// line search. One "iteration" is one accepted step; every line-search
// closure evaluation is counted in `evals`. On a failed line search the
// history is dropped and the step retried along steepest descent; a second
// consecutive failure stops with status "stagnated".
template <class Real>
LbfgsResult<Real> lbfgs_minimize(const LossGradFn<Real>& fn, std::vector<Real> theta0,
                                 const LbfgsOptions& opts, const IterCallback<Real>& on_iter = {}) {
  const std::size_t n = theta0.size();
  LbfgsResult<Real> out;

  // master iterate in double; closure sees Real
  std::vector<double> x(theta0.begin(), theta0.end());
  std::vector<Real> xr(n), gr(n);
  std::vector<double> g(n), g_new(n), x_new(n), d(n);

  auto eval = [&](std::span<const double> xv, std::span<double> gv) {
    for (std::size_t i = 0; i < n; ++i) xr[i] = static_cast<Real>(xv[i]);
    const double f = fn(xr, gr);
    for (std::size_t i = 0; i < n; ++i) gv[i] = static_cast<double>(gr[i]);
    ++out.evals;
    return f;
  };

  double f = eval(x, g);
  if (!std::isfinite(f))
    throw OptimError("L-BFGS: non-finite loss at the initial point", 0);

  std::deque<std::pair<std::vector<double>, std::vector<double>>> hist;  // (s, y)
  std::vector<double> alpha_buf(opts.history);
  bool last_failed = false;

  auto two_loop = [&](std::span<const double> grad, std::span<double> dir) {
    for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
    if (hist.empty()) return;
    const int m = static_cast<int>(hist.size());
    for (int k = m - 1; k >= 0; --k) {
      const auto& [s, y] = hist[k];
      const double rho = 1.0 / detail::dot(s, y);
      const double a = rho * detail::dot(s, dir);
      alpha_buf[k] = a;
      for (std::size_t i = 0; i < n; ++i) dir[i] -= a * y[i];
    }
    const auto& [s_last, y_last] = hist.back();
    const double gamma = detail::dot(s_last, y_last) / detail::dot(y_last, y_last);
    for (std::size_t i = 0; i < n; ++i) dir[i] *= gamma;
    for (int k = 0; k < m; ++k) {
      const auto& [s, y] = hist[k];
      const double rho = 1.0 / detail::dot(s, y);
      const double b = rho * detail::dot(y, dir);
      for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha_buf[k] - b) * s[i];
    }
  };

  long iter = 0;
  out.status = "max_iters";
  while (iter < opts.max_iters) {
    const double gnorm = detail::norm2(g);
    if (gnorm <= opts.grad_tol) {
      out.status = "grad_tol";
      break;
    }
    two_loop(g, d);
    double dphi0 = detail::dot(g, d);
    if (!(dphi0 < 0.0)) {  // not a descent direction; reset to steepest descent
      hist.clear();
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      dphi0 = -gnorm * gnorm;
    }

    // strong Wolfe line search on phi(a) = f(x + a d)
    auto phi = [&](double a, std::span<double> gout) {
      for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + a * d[i];
      double v = eval(x_new, gout);
      if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
      return v;
    };

    const double phi0 = f;
    double a = 1.0;
    if (iter == 0 && hist.empty()) {
      double g1 = 0.0;
      for (std::size_t i = 0; i < n; ++i) g1 += std::fabs(g[i]);
      a = std::min(1.0, 1.0 / std::max(g1, 1e-16));
    }

    int ls_evals = 0;
    bool accepted = false;
    double a_acc = 0.0, f_acc = 0.0;
    bool wolfe_ok = false;

    auto try_zoom = [&](double lo, double f_lo, double dlo, double hi, double f_hi, double dhi) {
      while (ls_evals < opts.max_line_search) {
        if (std::fabs(hi - lo) <= 1e-16 * std::max(1.0, std::fabs(lo))) return;
        const double aj = detail::cubic_step(lo, f_lo, dlo, hi, f_hi, dhi);
        const double fj = phi(aj, g_new);
        ++ls_evals;
        const double dj = detail::dot(g_new, d);
        if (fj > phi0 + opts.c1 * aj * dphi0 || fj >= f_lo) {
          hi = aj;
          f_hi = fj;
          dhi = dj;
        } else {
          if (std::fabs(dj) <= -opts.c2 * dphi0) {
            accepted = true;
            wolfe_ok = true;
            a_acc = aj;
            f_acc = fj;
            return;
          }
          if (dj * (hi - lo) >= 0.0) {
            hi = lo;
            f_hi = f_lo;
            dhi = dlo;
          }
          lo = aj;
          f_lo = fj;
          dlo = dj;
        }
      }
    };

    {
      double a_prev = 0.0, f_prev = phi0, d_prev = dphi0;
      double ai = a;
      while (ls_evals < opts.max_line_search) {
        const double fi = phi(ai, g_new);
        ++ls_evals;
        const double di = detail::dot(g_new, d);
        if (fi > phi0 + opts.c1 * ai * dphi0 || (ls_evals > 1 && fi >= f_prev)) {
          try_zoom(a_prev, f_prev, d_prev, ai, fi, di);
          break;
        }
        if (std::fabs(di) <= -opts.c2 * dphi0) {
          accepted = true;
          wolfe_ok = true;
          a_acc = ai;
          f_acc = fi;
          break;
        }
        if (di >= 0.0) {
          try_zoom(ai, fi, di, a_prev, f_prev, d_prev);
          break;
        }
        a_prev = ai;
        f_prev = fi;
        d_prev = di;
        ai = std::min(2.0 * ai, 1e10);
      }
    }

    if (!accepted) {
      if (last_failed) {
        out.status = "stagnated";
        break;
      }
      last_failed = true;
      hist.clear();  // retry from steepest descent next round
      continue;
    }
    last_failed = false;

    // g_new holds the gradient at the accepted point
    for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + a_acc * d[i];
    std::vector<double> s(n), yv(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      yv[i] = g_new[i] - g[i];
    }
    const double sy = detail::dot(s, yv);
    if (sy > 1e-10 * detail::norm2(s) * detail::norm2(yv)) {
      hist.emplace_back(std::move(s), std::move(yv));
      if (static_cast<int>(hist.size()) > opts.history) hist.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_acc;
    ++iter;
    out.trace.push_back({f, a_acc, detail::norm2(g), ls_evals, wolfe_ok});
    if (on_iter) {
      for (std::size_t i = 0; i < n; ++i) xr[i] = static_cast<Real>(x[i]);
      on_iter(iter, f, xr);
    }
  }

  out.theta.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.theta[i] = static_cast<Real>(x[i]);
  out.final_loss = f;
  out.final_grad_norm = detail::norm2(g);
  return out;
}

}  // namespace cpinn
