// Compiled with -mavx512f -mavx512dq; only dispatched to when the CPU
// reports those features.

#include "cpinn/kernel_impl.hpp"

namespace cpinn {

template <class Real>
std::unique_ptr<FieldKernel<Real>> make_kernel_avx512();

template <>
std::unique_ptr<FieldKernel<double>> make_kernel_avx512<double>() {
  return std::make_unique<detail::LaneKernel<simd::Pack<double, 8>>>("avx512");
}

template <>
std::unique_ptr<FieldKernel<float>> make_kernel_avx512<float>() {
  return std::make_unique<detail::LaneKernel<simd::Pack<float, 16>>>("avx512");
}

}  // namespace cpinn
