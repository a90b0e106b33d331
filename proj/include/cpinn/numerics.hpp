#pragma once

#include <cstddef>
#include <span>

namespace cpinn {

// Pairwise summation in fixed index order: bounds floating-point drift and
// is independent of how the values were produced (worker count, lanes).
inline double pairwise_sum(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n <= 32) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace cpinn
