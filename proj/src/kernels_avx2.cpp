// Compiled with -mavx2 -mfma; only dispatched to when the CPU reports AVX2+FMA.

#include "cpinn/kernel_impl.hpp"

namespace cpinn {

template <class Real>
std::unique_ptr<FieldKernel<Real>> make_kernel_avx2();

template <>
std::unique_ptr<FieldKernel<double>> make_kernel_avx2<double>() {
  return std::make_unique<detail::LaneKernel<simd::Pack<double, 4>>>("avx2");
}

template <>
std::unique_ptr<FieldKernel<float>> make_kernel_avx2<float>() {
  return std::make_unique<detail::LaneKernel<simd::Pack<float, 8>>>("avx2");
}

}  // namespace cpinn
