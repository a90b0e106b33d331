#include "cpinn/kernel_impl.hpp"

namespace cpinn {

template <class Real>
std::unique_ptr<FieldKernel<Real>> make_kernel_scalar() {
  return std::make_unique<detail::LaneKernel<simd::Pack<Real, 1>>>("scalar");
}

template std::unique_ptr<FieldKernel<double>> make_kernel_scalar<double>();
template std::unique_ptr<FieldKernel<float>> make_kernel_scalar<float>();

}  // namespace cpinn
