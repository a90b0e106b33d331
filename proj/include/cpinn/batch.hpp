#pragma once

#include <cstring>
#include <span>
#include <vector>

#include "cpinn/kernels.hpp"

namespace cpinn {

// Collocation points repacked lane-major for one kernel width:
// data[(g*dim + c)*W + j] = coordinate c of point g*W+j. The tail group is
// padded by replicating the first point; padded lanes carry zero cotangents
// and their outputs are never read.
template <class Real>
struct PackedPoints {
  int dim = 0;
  int lane = 1;
  std::size_t n = 0;
  std::size_t groups = 0;
  std::vector<Real> data;

  PackedPoints() = default;

  PackedPoints(const FieldKernel<Real>& kernel, std::span<const double> pts_point_major, int d) {
    dim = d;
    lane = kernel.width();
    n = d > 0 ? pts_point_major.size() / d : 0;
    groups = (n + lane - 1) / lane;
    data.assign(groups * static_cast<std::size_t>(dim) * lane, Real(0));
    for (std::size_t g = 0; g < groups; ++g) {
      for (int j = 0; j < lane; ++j) {
        const std::size_t i = g * lane + j;
        const std::size_t src = (i < n ? i : 0) * dim;
        for (int c = 0; c < dim; ++c)
          data[(g * dim + c) * lane + j] = static_cast<Real>(pts_point_major[src + c]);
      }
    }
  }

  const Real* group(std::size_t g) const { return data.data() + g * static_cast<std::size_t>(dim) * lane; }
  int valid_lanes(std::size_t g) const {
    return g + 1 < groups ? lane : static_cast<int>(n - g * lane);
  }
};

// Parallel value-only evaluation of nets over a fixed point set (metric and
// trace evaluation, control recovery, heatmap grids). Points are packed once.
template <class Real>
class ValueBatch {
 public:
  ValueBatch(const FieldKernel<Real>& kernel, std::span<const double> pts, int dim)
      : kernel_(kernel), pp_(kernel, pts, dim) {}

  std::size_t n() const { return pp_.n; }

  std::vector<double> eval(const Mlp<Real>& net) const;

 private:
  const FieldKernel<Real>& kernel_;
  PackedPoints<Real> pp_;
};

}  // namespace cpinn
