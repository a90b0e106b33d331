#include "cpinn/bounds.hpp"

#include <cmath>

namespace cpinn {

BoundCertificate bound_certificate(const Mlp<double>& net) {
  const MlpShape& s = net.shape;
  const int L = s.depth();
  BoundCertificate c;
  c.r_declared = net.param_bound;
  c.r_used = std::max(net.param_bound, net.max_abs_param());
  c.param_count = s.param_count;
  const double R = c.r_used;

  c.width_products.resize(L);
  c.width_products[0] = s.widths[0];  // pi_0 = n_0
  for (int i = 1; i < L; ++i) c.width_products[i] = c.width_products[i - 1] * s.widths[i];

  c.value_bound.resize(L);
  c.gradient_bound.resize(L);
  c.second_deriv_bound.resize(L);

  // value bounds: pre-activation |z| <= n_{l-1} R h_{l-1} + R, then the
  // activation's own range; the output layer is affine
  double h_prev = 1.0;  // |x_j| <= 1 on the unit box
  for (int l = 1; l <= L - 1; ++l) {
    const double z_bound = s.widths[l - 1] * R * h_prev + R;
    double h_bound;
    if (s.activation == ActivationKind::Tanh)
      h_bound = std::min(1.0, z_bound);  // |tanh z| <= min(1, |z|)
    else
      h_bound = 1.0 / (1.0 + std::exp(-z_bound));  // sigmoid is increasing
    c.value_bound[l - 1] = h_bound;
    h_prev = h_bound;
  }
  c.value_bound[L - 1] = s.widths[L - 1] * R;

  double rl = 1.0;
  for (int l = 1; l <= L; ++l) {
    rl *= R;
    const double pi_prev = c.width_products[l - 1];
    c.gradient_bound[l - 1] = pi_prev * rl;
    c.second_deriv_bound[l - 1] = static_cast<double>(l) * pi_prev * pi_prev * rl * rl;
  }

  const double eta = s.activation == ActivationKind::Tanh ? 2.0 : 1.0;
  const double piL1 = c.width_products[L - 1];
  c.lipschitz_second = 2.0 * (L - 1) * L * eta * std::sqrt(static_cast<double>(c.param_count)) *
                       piL1 * piL1 * piL1 * std::pow(R, 3 * L - 3);
  return c;
}

double laplacian_global_bound(const Mlp<double>& net) {
  const MlpShape& s = net.shape;
  const int L = s.depth();
  const double R = std::max(net.param_bound, net.max_abs_param());
  const double N = static_cast<double>(s.param_count);
  return s.widths[0] * static_cast<double>(L) * std::pow(N, 2 * L) * std::pow(R, 2 * L);
}

}  // namespace cpinn
