#include <cstdlib>
#include <memory>
#include <stdexcept>

#include "cpinn/kernels.hpp"

namespace cpinn {

template <class Real>
std::unique_ptr<FieldKernel<Real>> make_kernel_scalar();

#if defined(CPINN_X86_KERNELS)
template <class Real>
std::unique_ptr<FieldKernel<Real>> make_kernel_avx2();
template <class Real>
std::unique_ptr<FieldKernel<Real>> make_kernel_avx512();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(CPINN_X86_KERNELS)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

bool cpu_has_avx512() {
#if defined(CPINN_X86_KERNELS)
  return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512dq");
#else
  return false;
#endif
}

template <class Real>
struct KernelTable {
  std::unique_ptr<FieldKernel<Real>> scalar;
  std::unique_ptr<FieldKernel<Real>> avx2;
  std::unique_ptr<FieldKernel<Real>> avx512;
  const FieldKernel<Real>* selected = nullptr;

  KernelTable() {
    scalar = make_kernel_scalar<Real>();
#if defined(CPINN_X86_KERNELS)
    if (cpu_has_avx2()) avx2 = make_kernel_avx2<Real>();
    if (cpu_has_avx512()) avx512 = make_kernel_avx512<Real>();
#endif
    const char* want = std::getenv("CPINN_KERNEL");
    if (want && *want) {
      const FieldKernel<Real>* k = by_name(want);
      if (!k)
        throw std::runtime_error(std::string("CPINN_KERNEL=") + want +
                                 " is not available on this machine");
      selected = k;
    } else if (avx512) {
      selected = avx512.get();
    } else if (avx2) {
      selected = avx2.get();
    } else {
      selected = scalar.get();
    }
  }

  const FieldKernel<Real>* by_name(const std::string& n) const {
    if (n == "scalar") return scalar.get();
    if (n == "avx2") return avx2.get();
    if (n == "avx512") return avx512.get();
    return nullptr;
  }
};

template <class Real>
KernelTable<Real>& table() {
  static KernelTable<Real> t;
  return t;
}

}  // namespace

template <class Real>
const FieldKernel<Real>& select_kernel() {
  return *table<Real>().selected;
}

template <class Real>
const FieldKernel<Real>* find_kernel(const std::string& name) {
  return table<Real>().by_name(name);
}

std::vector<std::string> available_kernel_names() {
  std::vector<std::string> out{"scalar"};
  if (cpu_has_avx2()) out.push_back("avx2");
  if (cpu_has_avx512()) out.push_back("avx512");
  return out;
}

template const FieldKernel<double>& select_kernel<double>();
template const FieldKernel<float>& select_kernel<float>();
template const FieldKernel<double>* find_kernel<double>(const std::string&);
template const FieldKernel<float>* find_kernel<float>(const std::string&);

}  // namespace cpinn
