#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cpinn/mlp.hpp"

namespace cpinn {

// Batched field-evaluation kernels. One "group" is `width()` collocation
// points processed in lockstep, one point per lane; all buffers exchanged
// with the kernel are lane-major:
//   xg, out_g, cg : [d][W]      out_v, out_lap, cv, cl : [W]
//   grad_lanes    : [param][W]  (accumulated with +=; reduce at block end)
// Lanes never interact, so a W-lane kernel performs the identical per-point
// arithmetic as the W=1 instantiation of the same template.
template <class Real>
class FieldKernel {
 public:
  virtual ~FieldKernel() = default;
  virtual const char* name() const = 0;
  virtual int width() const = 0;

  virtual std::size_t tape_reals(const MlpShape& s) const = 0;
  virtual std::size_t value_tape_reals(const MlpShape& s) const = 0;
  virtual std::size_t scratch_reals(const MlpShape& s) const = 0;

  // Full evaluation: value, input gradient (optional), Laplacian.
  virtual void forward_group(const MlpShape& s, const Real* params, const Real* xg, Real* tape,
                             Real* scratch, Real* out_v, Real* out_g, Real* out_lap) const = 0;
  // Accumulates d/dtheta of cv*value + cg.gradient + cl*laplacian per lane.
  virtual void backward_group(const MlpShape& s, const Real* params, const Real* xg,
                              const Real* tape, Real* scratch, const Real* cv, const Real* cg,
                              const Real* cl, Real* grad_lanes) const = 0;

  // Value-only fast path (boundary terms, control fits, metric evaluation).
  virtual void forward_values_group(const MlpShape& s, const Real* params, const Real* xg,
                                    Real* tape, Real* out_v) const = 0;
  virtual void backward_values_group(const MlpShape& s, const Real* params, const Real* xg,
                                     const Real* tape, Real* scratch, const Real* cv,
                                     Real* grad_lanes) const = 0;

  // grad_out[i] += sum over lanes of grad_lanes[i*W..i*W+W), fixed lane order.
  virtual void reduce_grad_lanes(const Real* grad_lanes, std::size_t nparams,
                                 Real* grad_out) const = 0;
};

// Best kernel available on this CPU, or the one named in CPINN_KERNEL
// (scalar | avx2 | avx512). Throws if a requested kernel is unavailable.
template <class Real>
const FieldKernel<Real>& select_kernel();

template <class Real>
const FieldKernel<Real>* find_kernel(const std::string& name);

std::vector<std::string> available_kernel_names();

}  // namespace cpinn
