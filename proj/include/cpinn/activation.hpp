#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cpinn {

enum class ActivationKind { Tanh, Sigmoid };

inline std::string to_string(ActivationKind k) {
  return k == ActivationKind::Tanh ? "tanh" : "sigmoid";
}

inline ActivationKind activation_from_string(std::string_view s) {
  if (s == "tanh") return ActivationKind::Tanh;
  if (s == "sigmoid") return ActivationKind::Sigmoid;
  throw std::invalid_argument("unknown activation '" + std::string(s) +
                              "' (expected tanh or sigmoid)");
}

// Value and first three derivatives of the activation at one point.
struct ActDerivs {
  double rho;
  double d1;
  double d2;
  double d3;
};

// Closed forms:
//   tanh:    rho' = 1 - rho^2,  rho'' = -2 rho (1 - rho^2),
//            rho''' = (6 rho^2 - 2)(1 - rho^2)
//   sigmoid: rho' = rho(1-rho), rho'' = rho'(1-2 rho),
//            rho''' = rho'(1 - 6 rho + 6 rho^2)
//
// Both are evaluated through a single exp of a nonpositive argument, so the
// chain saturates smoothly (exp underflows to 0) and never produces NaN for
// any finite input. rho' uses the algebraically equivalent quotient form,
// which keeps full precision in the saturated tails.
inline ActDerivs activation_eval(ActivationKind kind, double t) {
  ActDerivs out;
  if (kind == ActivationKind::Tanh) {
    const double a = std::fabs(t);
    const double e = std::exp(-2.0 * a);        // in (0, 1]
    const double den = 1.0 + e;
    const double mag = (1.0 - e) / den;         // |tanh t|
    const double rho = t < 0.0 ? -mag : mag;
    const double d1 = 4.0 * e / (den * den);    // == 1 - rho^2
    out.rho = rho;
    out.d1 = d1;
    out.d2 = -2.0 * rho * d1;
    out.d3 = (6.0 * rho * rho - 2.0) * d1;
  } else {
    const double a = std::fabs(t);
    const double e = std::exp(-a);              // in (0, 1]
    const double den = 1.0 + e;
    const double rho = t >= 0.0 ? 1.0 / den : e / den;
    const double d1 = e / (den * den);          // == rho (1 - rho)
    out.rho = rho;
    out.d1 = d1;
    out.d2 = d1 * (1.0 - 2.0 * rho);
    out.d3 = d1 * (1.0 - 6.0 * rho + 6.0 * rho * rho);
  }
  return out;
}

}  // namespace cpinn
