#pragma once

#include <cstdint>
#include <string_view>

namespace cpinn {

// Counter-based generator (splitmix64 output function on a golden-ratio
// stride). Stateless in the counter, so streams can be split by key and
// sampled out of order or in parallel with identical results on every
// platform: the only floating-point op is one exactly-rounded scale.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t bits(std::uint64_t counter) const {
    std::uint64_t z = key_ + 0x9e3779b97f4a7c15ULL * (counter + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform01(counter);
  }

  // Derive an independent stream key from a tag (FNV-1a over the tag,
  // remixed with this key).
  CounterRng split(std::string_view tag) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    CounterRng mixed(key_ ^ h);
    return CounterRng(mixed.bits(0));
  }

  CounterRng split(std::uint64_t salt) const {
    CounterRng s(key_ ^ (0x9e3779b97f4a7c15ULL + salt));
    return CounterRng(s.bits(salt));
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// Sequential convenience wrapper over a CounterRng stream.
class RngStream {
 public:
  explicit RngStream(CounterRng rng) : rng_(rng) {}
  double uniform01() { return rng_.uniform01(counter_++); }
  double uniform(double lo, double hi) { return rng_.uniform(counter_++, lo, hi); }
  std::uint64_t bits() { return rng_.bits(counter_++); }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

}  // namespace cpinn
