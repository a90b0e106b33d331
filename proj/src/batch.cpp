#include "cpinn/batch.hpp"

#include "cpinn/threads.hpp"

namespace cpinn {

template <class Real>
std::vector<double> ValueBatch<Real>::eval(const Mlp<Real>& net) const {
  std::vector<double> out(pp_.n);
  if (pp_.n == 0) return out;
  const int W = kernel_.width();
  const std::size_t groups_per_block = std::max<std::size_t>(1, 512 / W);
  const std::size_t nblocks = (pp_.groups + groups_per_block - 1) / groups_per_block;
  const std::size_t tape_n = kernel_.value_tape_reals(net.shape);
  std::vector<std::vector<Real>> tapes(ThreadPool::instance().size());
  std::vector<std::vector<Real>> vbufs(ThreadPool::instance().size());
  ThreadPool::instance().parallel_blocks(nblocks, [&](std::size_t b, int tid) {
    auto& tape = tapes[tid];
    auto& v = vbufs[tid];
    if (tape.size() < tape_n) tape.resize(tape_n);
    if (v.size() < static_cast<std::size_t>(W)) v.resize(W);
    const std::size_t g0 = b * groups_per_block;
    const std::size_t g1 = std::min(pp_.groups, g0 + groups_per_block);
    for (std::size_t g = g0; g < g1; ++g) {
      kernel_.forward_values_group(net.shape, net.params.data(), pp_.group(g), tape.data(),
                                   v.data());
      for (int j = 0; j < pp_.valid_lanes(g); ++j)
        out[g * W + j] = static_cast<double>(v[j]);
    }
  });
  return out;
}

template class ValueBatch<double>;
template class ValueBatch<float>;

}  // namespace cpinn
