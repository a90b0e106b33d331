#pragma once

#include <cstddef>
#include <vector>

#include "cpinn/mlp.hpp"

namespace cpinn {

// Analytic certificates on a network's value and derivatives over the unit
// box |x_j| <= 1, in terms of depth L, widths and the weight magnitude R.
// Conventions (layers l = 1..L):
//   pi_i = n_0 * n_1 * ... * n_i  (pi_0 = n_0, the input dimension)
//   |f^{(l)}|      : recursive activation bound; output layer n_{L-1} R
//   |d_xp f^{(l)}| <= pi_{l-1} R^l
//   |d2_xp f^{(l)}| <= l pi_{l-1}^2 R^{2l}
// and the parameter-Lipschitz bound on the second derivative
//   |d2 f_theta - d2 f_theta'| <= 2(L-1) L eta sqrt(N) pi_{L-1}^3 R^{3L-3}
//                                  * |theta - theta'|_2
// with eta = 2 for tanh, 1 for sigmoid, N the parameter count.
struct BoundCertificate {
  double r_declared = 0.0;
  double r_used = 0.0;  // max(declared, |theta|_inf)
  std::vector<double> width_products;     // pi_0 .. pi_{L-1}
  std::vector<double> value_bound;        // per layer 1..L
  std::vector<double> gradient_bound;     // per layer 1..L
  std::vector<double> second_deriv_bound; // per layer 1..L
  double lipschitz_second = 0.0;
  std::size_t param_count = 0;

  double output_value_bound() const { return value_bound.back(); }
  double output_gradient_bound() const { return gradient_bound.back(); }
  double output_second_bound() const { return second_deriv_bound.back(); }
};

BoundCertificate bound_certificate(const Mlp<double>& net);

// Loose global Laplacian bound d * L * N^{2L} * R^{2L} (N = parameter
// count), the form the statistical analysis consumes.
double laplacian_global_bound(const Mlp<double>& net);

}  // namespace cpinn
