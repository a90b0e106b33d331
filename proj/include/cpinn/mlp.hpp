#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpinn/activation.hpp"
#include "cpinn/rng.hpp"

namespace cpinn {

// Architecture of a fully connected scalar field: widths n_0..n_L (n_L = 1)
// plus parameter offsets into the flat layer-major vector
// [W1 row-major, b1, W2, b2, ..., WL, bL].
struct MlpShape {
  std::vector<int> widths;
  ActivationKind activation = ActivationKind::Tanh;
  std::vector<std::size_t> weight_off;  // per layer l = 0..L-1
  std::vector<std::size_t> bias_off;
  std::size_t param_count = 0;

  MlpShape() = default;
  MlpShape(std::vector<int> w, ActivationKind act) : widths(std::move(w)), activation(act) {
    if (widths.size() < 2)
      throw std::invalid_argument("mlp widths need at least an input and an output layer, got " +
                                  std::to_string(widths.size()) + " entries");
    for (std::size_t i = 0; i < widths.size(); ++i)
      if (widths[i] < 1)
        throw std::invalid_argument("mlp width entry " + std::to_string(i) + " is " +
                                    std::to_string(widths[i]) + ", must be >= 1");
    if (widths.back() != 1)
      throw std::invalid_argument("mlp output width must be 1, got " +
                                  std::to_string(widths.back()));
    const int L = depth();
    weight_off.resize(L);
    bias_off.resize(L);
    std::size_t off = 0;
    for (int l = 0; l < L; ++l) {
      weight_off[l] = off;
      off += static_cast<std::size_t>(widths[l + 1]) * widths[l];
      bias_off[l] = off;
      off += widths[l + 1];
    }
    param_count = off;
  }

  int depth() const { return static_cast<int>(widths.size()) - 1; }  // L
  int input_dim() const { return widths.front(); }
  int max_width() const {
    int m = 0;
    for (int w : widths) m = m > w ? m : w;
    return m;
  }
  bool operator==(const MlpShape& o) const {
    return widths == o.widths && activation == o.activation;
  }
};

// A fully connected neural field. Parameters live in one flat vector; the
// flat order IS the canonical flattening, so flatten/unflatten are views of
// the same storage. Values are immutable during batched evaluation; updates
// happen single-writer between evaluations.
template <class Real>
struct Mlp {
  MlpShape shape;
  std::vector<Real> params;
  double param_bound = 0.0;  // declared R; certificate metadata only

  Mlp() = default;
  explicit Mlp(MlpShape s) : shape(std::move(s)), params(shape.param_count, Real(0)) {}

  int depth() const { return shape.depth(); }
  int input_dim() const { return shape.input_dim(); }
  std::size_t param_count() const { return shape.param_count; }

  const Real* weights(int layer) const { return params.data() + shape.weight_off[layer]; }
  Real* weights(int layer) { return params.data() + shape.weight_off[layer]; }
  const Real* biases(int layer) const { return params.data() + shape.bias_off[layer]; }
  Real* biases(int layer) { return params.data() + shape.bias_off[layer]; }

  std::vector<Real> flatten() const { return params; }
  void set_flat(std::span<const Real> theta) {
    if (theta.size() != params.size())
      throw std::invalid_argument("parameter vector length " + std::to_string(theta.size()) +
                                  " does not match mlp parameter count " +
                                  std::to_string(params.size()));
    params.assign(theta.begin(), theta.end());
  }

  double max_abs_param() const {
    double m = 0.0;
    for (Real p : params) m = std::max(m, std::fabs(static_cast<double>(p)));
    return m;
  }

  template <class R2>
  Mlp<R2> cast() const {
    Mlp<R2> out(shape);
    out.param_bound = param_bound;
    for (std::size_t i = 0; i < params.size(); ++i)
      out.params[i] = static_cast<R2>(params[i]);
    return out;
  }
};

// Glorot-uniform weights (range +-sqrt(6/(n_in+n_out))), zero biases, drawn
// from the counter stream keyed by seed: identical (widths, kind, seed) give
// bit-identical parameters on every platform.
template <class Real>
Mlp<Real> init_mlp(const std::vector<int>& widths, ActivationKind kind, std::uint64_t seed) {
  Mlp<Real> net(MlpShape(widths, kind));
  CounterRng rng = CounterRng(seed).split("glorot-init");
  const int L = net.depth();
  for (int l = 0; l < L; ++l) {
    const int n_in = widths[l];
    const int n_out = widths[l + 1];
    const double a = std::sqrt(6.0 / (n_in + n_out));
    Real* w = net.weights(l);
    const std::size_t count = static_cast<std::size_t>(n_in) * n_out;
    const std::size_t base = net.shape.weight_off[l];
    for (std::size_t k = 0; k < count; ++k)
      w[k] = static_cast<Real>(rng.uniform(base + k, -a, a));
    // biases stay zero
  }
  net.param_bound = net.max_abs_param();
  return net;
}

// Scales the output layer (weights and bias) by `s`. Used to start control
// fields inside the admissible box on constrained problems.
template <class Real>
void scale_output_layer(Mlp<Real>& net, double s) {
  const int l = net.depth() - 1;
  const std::size_t n = static_cast<std::size_t>(net.shape.widths[l]) * net.shape.widths[l + 1] +
                        net.shape.widths[l + 1];
  Real* w = net.weights(l);
  for (std::size_t k = 0; k < n; ++k) w[k] = static_cast<Real>(w[k] * s);
}

// Checkpoint files: text header (precision, activation, widths, count)
// followed by one parameter per line in flattening order. Round-trips
// exactly (shortest-exact decimal digits per precision).
void save_checkpoint(const std::string& path, const MlpShape& shape,
                     std::span<const double> params, int precision_bits);
void save_checkpoint(const std::string& path, const Mlp<double>& net);
void save_checkpoint(const std::string& path, const Mlp<float>& net);

struct Checkpoint {
  MlpShape shape;
  int precision_bits = 64;
  std::vector<double> params;  // exact values regardless of stored precision

  template <class Real>
  Mlp<Real> as() const {
    Mlp<Real> net(shape);
    for (std::size_t i = 0; i < params.size(); ++i)
      net.params[i] = static_cast<Real>(params[i]);
    net.param_bound = net.max_abs_param();
    return net;
  }
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace cpinn
