#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "cpinn/batch.hpp"
#include "cpinn/kernels.hpp"
#include "cpinn/numerics.hpp"
#include "cpinn/threads.hpp"

namespace cpinn {

// Drives the selected field kernel over fixed interior/boundary collocation
// sets for a small set of networks, calls a per-point residual callback, and
// accumulates per-point loss terms plus (optionally) parameter gradients.
//
// Determinism: points are processed in fixed-size blocks; per-point terms
// land in index-order arrays reduced by pairwise summation, and per-block
// gradients are reduced in block order. Results are identical for any
// worker count.
template <class Real>
class ObjectiveEngine {
 public:
  struct NetRole {
    MlpShape shape;
    bool interior_full = true;  // value+gradient+laplacian on interior points
    bool on_boundary = false;   // value on boundary points
  };

  struct Fields {
    double value = 0.0;
    double lap = 0.0;
    const double* grad = nullptr;  // length dim, null for value-only nets
  };

  struct Cots {
    double v = 0.0;
    double lap = 0.0;
    double* grad = nullptr;  // length dim, null for value-only nets
  };

  // interior: (index, x, fields per net, terms_row, cots per net or null)
  using InteriorFn =
      std::function<void(std::size_t, const double*, const Fields*, double*, Cots*)>;
  // boundary: (index, x, values per net, terms_row, value-cots per net or null)
  using BoundaryFn =
      std::function<void(std::size_t, const double*, const double*, double*, double*)>;

  struct Result {
    std::vector<double> interior_terms;
    std::vector<double> boundary_terms;
    std::vector<std::vector<Real>> grads;  // per net, empty unless want_grad
  };

  ObjectiveEngine(const FieldKernel<Real>& kernel, int dim, std::vector<NetRole> roles,
                  std::span<const double> interior_pts, std::span<const double> boundary_pts,
                  int n_interior_terms, int n_boundary_terms)
      : kernel_(kernel),
        dim_(dim),
        roles_(std::move(roles)),
        interior_raw_(interior_pts.begin(), interior_pts.end()),
        boundary_raw_(boundary_pts.begin(), boundary_pts.end()),
        packed_interior_(kernel, interior_pts, dim),
        packed_boundary_(kernel, boundary_pts, dim),
        n_int_terms_(n_interior_terms),
        n_bd_terms_(n_boundary_terms) {
    if (roles_.size() > 8 || dim_ > 8)
      throw std::invalid_argument("engine supports up to 8 nets and 8 dimensions");
    groups_per_block_ = std::max<std::size_t>(1, kBlockPoints / kernel_.width());
    workspaces_.resize(ThreadPool::instance().size());
  }

  std::size_t n_interior() const { return packed_interior_.n; }
  std::size_t n_boundary() const { return packed_boundary_.n; }
  int n_nets() const { return static_cast<int>(roles_.size()); }
  const MlpShape& shape(int net) const { return roles_[net].shape; }

  Result evaluate(const std::vector<const Real*>& params, bool want_grad, const InteriorFn& fi,
                  const BoundaryFn& fb) {
    if (params.size() != roles_.size())
      throw std::invalid_argument("engine: wrong number of parameter vectors");
    const int W = kernel_.width();
    const int nnets = n_nets();

    const std::size_t nbi =
        (packed_interior_.groups + groups_per_block_ - 1) / groups_per_block_;
    const std::size_t nbb =
        (packed_boundary_.groups + groups_per_block_ - 1) / groups_per_block_;
    const std::size_t nblocks = nbi + nbb;

    int_terms_.assign(static_cast<std::size_t>(n_int_terms_) * packed_interior_.n, 0.0);
    bd_terms_.assign(static_cast<std::size_t>(n_bd_terms_) * packed_boundary_.n, 0.0);

    std::vector<std::size_t> grad_off(nnets + 1, 0);
    if (want_grad) {
      for (int s = 0; s < nnets; ++s)
        grad_off[s + 1] = grad_off[s] + roles_[s].shape.param_count;
      block_grads_.assign(nblocks * grad_off[nnets], Real(0));
    }

    ThreadPool::instance().parallel_blocks(nblocks, [&](std::size_t b, int tid) {
      Workspace& ws = workspaces_[tid];
      prepare_workspace(ws);
      Real* bg = want_grad ? block_grads_.data() + b * grad_off[nnets] : nullptr;
      if (b < nbi)
        run_interior_block(b, params, want_grad, fi, ws, bg, grad_off);
      else
        run_boundary_block(b - nbi, params, want_grad, fb, ws, bg, grad_off);
    });

    Result res;
    res.interior_terms.resize(n_int_terms_);
    for (int t = 0; t < n_int_terms_; ++t)
      res.interior_terms[t] = pairwise_sum(
          std::span<const double>(int_terms_.data() + static_cast<std::size_t>(t) * packed_interior_.n,
                                  packed_interior_.n));
    res.boundary_terms.resize(n_bd_terms_);
    for (int t = 0; t < n_bd_terms_; ++t)
      res.boundary_terms[t] = pairwise_sum(
          std::span<const double>(bd_terms_.data() + static_cast<std::size_t>(t) * packed_boundary_.n,
                                  packed_boundary_.n));
    if (want_grad) {
      res.grads.resize(nnets);
      for (int s = 0; s < nnets; ++s) {
        res.grads[s].assign(roles_[s].shape.param_count, Real(0));
        for (std::size_t b = 0; b < nblocks; ++b) {
          const Real* src = block_grads_.data() + b * grad_off[nnets] + grad_off[s];
          for (std::size_t i = 0; i < roles_[s].shape.param_count; ++i)
            res.grads[s][i] += src[i];
        }
      }
    }
    return res;
  }

 private:
  static constexpr std::size_t kBlockPoints = 512;

  struct Workspace {
    bool ready = false;
    // per net
    std::vector<std::vector<Real>> tape, grad_lanes;
    std::vector<std::vector<Real>> out_v, out_g, out_lap, cv, cg, cl;
    std::vector<Real> scratch;
    std::vector<double> fields_grad;  // nnets * dim extraction buffer
  };

  void prepare_workspace(Workspace& ws) {
    if (ws.ready) return;
    const int W = kernel_.width();
    const int nnets = n_nets();
    ws.tape.resize(nnets);
    ws.grad_lanes.resize(nnets);
    ws.out_v.resize(nnets);
    ws.out_g.resize(nnets);
    ws.out_lap.resize(nnets);
    ws.cv.resize(nnets);
    ws.cg.resize(nnets);
    ws.cl.resize(nnets);
    std::size_t scratch_n = 0;
    for (int s = 0; s < nnets; ++s) {
      const MlpShape& sh = roles_[s].shape;
      ws.tape[s].resize(std::max(kernel_.tape_reals(sh), kernel_.value_tape_reals(sh)));
      ws.grad_lanes[s].resize(sh.param_count * W);
      ws.out_v[s].resize(W);
      ws.out_g[s].resize(static_cast<std::size_t>(dim_) * W);
      ws.out_lap[s].resize(W);
      ws.cv[s].resize(W);
      ws.cg[s].resize(static_cast<std::size_t>(dim_) * W);
      ws.cl[s].resize(W);
      scratch_n = std::max(scratch_n, kernel_.scratch_reals(sh));
    }
    ws.scratch.resize(scratch_n);
    ws.fields_grad.resize(static_cast<std::size_t>(n_nets()) * dim_);
    ws.ready = true;
  }

  void run_interior_block(std::size_t block, const std::vector<const Real*>& params,
                          bool want_grad, const InteriorFn& fi, Workspace& ws, Real* block_grad,
                          const std::vector<std::size_t>& grad_off) {
    const int W = kernel_.width();
    const int nnets = n_nets();
    const std::size_t g0 = block * groups_per_block_;
    const std::size_t g1 = std::min(packed_interior_.groups, g0 + groups_per_block_);
    if (want_grad)
      for (int s = 0; s < nnets; ++s)
        std::fill(ws.grad_lanes[s].begin(), ws.grad_lanes[s].end(), Real(0));

    std::vector<typename ObjectiveEngine::Fields> fields(nnets);
    std::vector<typename ObjectiveEngine::Cots> cots(nnets);
    std::vector<double> terms_row(n_int_terms_);

    for (std::size_t g = g0; g < g1; ++g) {
      const Real* xg = packed_interior_.group(g);
      const int valid = packed_interior_.valid_lanes(g);
      for (int s = 0; s < nnets; ++s) {
        if (roles_[s].interior_full)
          kernel_.forward_group(roles_[s].shape, params[s], xg, ws.tape[s].data(),
                                ws.scratch.data(), ws.out_v[s].data(), ws.out_g[s].data(),
                                ws.out_lap[s].data());
        else
          kernel_.forward_values_group(roles_[s].shape, params[s], xg, ws.tape[s].data(),
                                       ws.out_v[s].data());
        if (want_grad) {
          std::fill(ws.cv[s].begin(), ws.cv[s].end(), Real(0));
          std::fill(ws.cg[s].begin(), ws.cg[s].end(), Real(0));
          std::fill(ws.cl[s].begin(), ws.cl[s].end(), Real(0));
        }
      }
      for (int j = 0; j < valid; ++j) {
        const std::size_t i = g * W + j;
        for (int s = 0; s < nnets; ++s) {
          fields[s].value = static_cast<double>(ws.out_v[s][j]);
          if (roles_[s].interior_full) {
            fields[s].lap = static_cast<double>(ws.out_lap[s][j]);
            double* gx = ws.fields_grad.data() + static_cast<std::size_t>(s) * dim_;
            for (int p = 0; p < dim_; ++p)
              gx[p] = static_cast<double>(ws.out_g[s][static_cast<std::size_t>(p) * W + j]);
            fields[s].grad = gx;
          } else {
            fields[s].lap = 0.0;
            fields[s].grad = nullptr;
          }
        }
        double cot_grad[8 * 8];
        if (want_grad) {
          for (int s = 0; s < nnets; ++s) {
            cots[s].v = 0.0;
            cots[s].lap = 0.0;
            if (roles_[s].interior_full) {
              double* cg = cot_grad + static_cast<std::size_t>(s) * 8;
              std::fill(cg, cg + dim_, 0.0);
              cots[s].grad = cg;
            } else {
              cots[s].grad = nullptr;
            }
          }
        }
        std::fill(terms_row.begin(), terms_row.end(), 0.0);
        fi(i, interior_raw_.data() + i * dim_, fields.data(), terms_row.data(),
           want_grad ? cots.data() : nullptr);
        for (int t = 0; t < n_int_terms_; ++t)
          int_terms_[static_cast<std::size_t>(t) * packed_interior_.n + i] = terms_row[t];
        if (want_grad) {
          for (int s = 0; s < nnets; ++s) {
            ws.cv[s][j] = static_cast<Real>(cots[s].v);
            ws.cl[s][j] = static_cast<Real>(cots[s].lap);
            if (cots[s].grad)
              for (int p = 0; p < dim_; ++p)
                ws.cg[s][static_cast<std::size_t>(p) * W + j] = static_cast<Real>(cots[s].grad[p]);
          }
        }
      }
      if (want_grad) {
        for (int s = 0; s < nnets; ++s) {
          if (roles_[s].interior_full)
            kernel_.backward_group(roles_[s].shape, params[s], xg, ws.tape[s].data(),
                                   ws.scratch.data(), ws.cv[s].data(), ws.cg[s].data(),
                                   ws.cl[s].data(), ws.grad_lanes[s].data());
          else
            kernel_.backward_values_group(roles_[s].shape, params[s], xg, ws.tape[s].data(),
                                          ws.scratch.data(), ws.cv[s].data(),
                                          ws.grad_lanes[s].data());
        }
      }
    }
    if (want_grad)
      for (int s = 0; s < nnets; ++s)
        kernel_.reduce_grad_lanes(ws.grad_lanes[s].data(), roles_[s].shape.param_count,
                                  block_grad + grad_off[s]);
  }

  void run_boundary_block(std::size_t block, const std::vector<const Real*>& params,
                          bool want_grad, const BoundaryFn& fb, Workspace& ws, Real* block_grad,
                          const std::vector<std::size_t>& grad_off) {
    const int W = kernel_.width();
    const int nnets = n_nets();
    const std::size_t g0 = block * groups_per_block_;
    const std::size_t g1 = std::min(packed_boundary_.groups, g0 + groups_per_block_);
    if (want_grad)
      for (int s = 0; s < nnets; ++s)
        std::fill(ws.grad_lanes[s].begin(), ws.grad_lanes[s].end(), Real(0));

    std::vector<double> values(nnets), vcots(nnets);
    std::vector<double> terms_row(n_bd_terms_);

    for (std::size_t g = g0; g < g1; ++g) {
      const Real* xg = packed_boundary_.group(g);
      const int valid = packed_boundary_.valid_lanes(g);
      for (int s = 0; s < nnets; ++s) {
        if (!roles_[s].on_boundary) continue;
        kernel_.forward_values_group(roles_[s].shape, params[s], xg, ws.tape[s].data(),
                                     ws.out_v[s].data());
        if (want_grad) std::fill(ws.cv[s].begin(), ws.cv[s].end(), Real(0));
      }
      for (int j = 0; j < valid; ++j) {
        const std::size_t i = g * W + j;
        for (int s = 0; s < nnets; ++s)
          values[s] = roles_[s].on_boundary ? static_cast<double>(ws.out_v[s][j]) : 0.0;
        std::fill(vcots.begin(), vcots.end(), 0.0);
        std::fill(terms_row.begin(), terms_row.end(), 0.0);
        fb(i, boundary_raw_.data() + i * dim_, values.data(), terms_row.data(),
           want_grad ? vcots.data() : nullptr);
        for (int t = 0; t < n_bd_terms_; ++t)
          bd_terms_[static_cast<std::size_t>(t) * packed_boundary_.n + i] = terms_row[t];
        if (want_grad)
          for (int s = 0; s < nnets; ++s)
            if (roles_[s].on_boundary) ws.cv[s][j] = static_cast<Real>(vcots[s]);
      }
      if (want_grad) {
        for (int s = 0; s < nnets; ++s) {
          if (!roles_[s].on_boundary) continue;
          kernel_.backward_values_group(roles_[s].shape, params[s], xg, ws.tape[s].data(),
                                        ws.scratch.data(), ws.cv[s].data(),
                                        ws.grad_lanes[s].data());
        }
      }
    }
    if (want_grad)
      for (int s = 0; s < nnets; ++s)
        kernel_.reduce_grad_lanes(ws.grad_lanes[s].data(), roles_[s].shape.param_count,
                                  block_grad + grad_off[s]);
  }

  const FieldKernel<Real>& kernel_;
  int dim_;
  std::vector<NetRole> roles_;
  std::vector<double> interior_raw_, boundary_raw_;
  PackedPoints<Real> packed_interior_, packed_boundary_;
  int n_int_terms_, n_bd_terms_;
  std::size_t groups_per_block_ = 1;
  std::vector<Workspace> workspaces_;
  std::vector<double> int_terms_, bd_terms_;
  std::vector<Real> block_grads_;
};

}  // namespace cpinn
