#pragma once

#include <cmath>
#include <cstdint>

#include "cpinn/activation.hpp"

#if defined(__AVX2__) || defined(__AVX512F__)
#include <immintrin.h>
#endif

// Fixed-width lane packs. Each pack holds W values of one collocation point
// per lane; every kernel op is vertical (no horizontal reductions in the hot
// loops). The same generic math (exp_nonpos, act_quad, layer kernels) is
// instantiated per pack type, so all variants perform the identical sequence
// of correctly-rounded operations per lane.

namespace cpinn::simd {

template <class T, int W>
struct Pack;

// ---------------------------------------------------------------- scalar --

template <>
struct Pack<double, 1> {
  using value_type = double;
  static constexpr int width = 1;
  double v;

  static Pack load(const double* p) { return {*p}; }
  void store(double* p) const { *p = v; }
  static Pack set1(double x) { return {x}; }
  static Pack zero() { return {0.0}; }

  friend Pack operator+(Pack a, Pack b) { return {a.v + b.v}; }
  friend Pack operator-(Pack a, Pack b) { return {a.v - b.v}; }
  friend Pack operator*(Pack a, Pack b) { return {a.v * b.v}; }
  friend Pack operator/(Pack a, Pack b) { return {a.v / b.v}; }
};

inline Pack<double, 1> fmadd(Pack<double, 1> a, Pack<double, 1> b, Pack<double, 1> c) {
  return {std::fma(a.v, b.v, c.v)};
}
inline Pack<double, 1> fnmadd(Pack<double, 1> a, Pack<double, 1> b, Pack<double, 1> c) {
  return {std::fma(-a.v, b.v, c.v)};
}
inline Pack<double, 1> rint(Pack<double, 1> a) { return {std::nearbyint(a.v)}; }
inline Pack<double, 1> max(Pack<double, 1> a, Pack<double, 1> b) { return {a.v > b.v ? a.v : b.v}; }
inline Pack<double, 1> min(Pack<double, 1> a, Pack<double, 1> b) { return {a.v < b.v ? a.v : b.v}; }
inline Pack<double, 1> abs(Pack<double, 1> a) { return {std::fabs(a.v)}; }
inline Pack<double, 1> copysign_pack(Pack<double, 1> mag, Pack<double, 1> sgn) {
  return {std::copysign(mag.v, sgn.v)};
}
// a where z >= 0, else b
inline Pack<double, 1> select_nonneg(Pack<double, 1> z, Pack<double, 1> a, Pack<double, 1> b) {
  return {z.v >= 0.0 ? a.v : b.v};
}
// 2^k for k held as a small-integer double in [-1022, 1023]
inline Pack<double, 1> splat_int_pow2(Pack<double, 1> k) {
  const double magic = 6755399441055744.0;  // 1.5 * 2^52
  std::uint64_t mb, kb;
  double tm = magic, tk = k.v + magic;
  __builtin_memcpy(&mb, &tm, 8);
  __builtin_memcpy(&kb, &tk, 8);
  const std::int64_t ki = static_cast<std::int64_t>(kb - mb);
  const std::uint64_t bits = static_cast<std::uint64_t>(ki + 1023) << 52;
  double out;
  __builtin_memcpy(&out, &bits, 8);
  return {out};
}

template <>
struct Pack<float, 1> {
  using value_type = float;
  static constexpr int width = 1;
  float v;

  static Pack load(const float* p) { return {*p}; }
  void store(float* p) const { *p = v; }
  static Pack set1(float x) { return {x}; }
  static Pack zero() { return {0.0f}; }

  friend Pack operator+(Pack a, Pack b) { return {a.v + b.v}; }
  friend Pack operator-(Pack a, Pack b) { return {a.v - b.v}; }
  friend Pack operator*(Pack a, Pack b) { return {a.v * b.v}; }
  friend Pack operator/(Pack a, Pack b) { return {a.v / b.v}; }
};

inline Pack<float, 1> fmadd(Pack<float, 1> a, Pack<float, 1> b, Pack<float, 1> c) {
  return {std::fmaf(a.v, b.v, c.v)};
}

// double companions for float activation math
struct WidePair1 {
  Pack<double, 1> lo;
};
inline WidePair1 widen(Pack<float, 1> a) { return {{static_cast<double>(a.v)}}; }
inline Pack<float, 1> narrow(WidePair1 w) { return {static_cast<float>(w.lo.v)}; }

// ------------------------------------------------------------------ AVX2 --

#if defined(__AVX2__)

template <>
struct Pack<double, 4> {
  using value_type = double;
  static constexpr int width = 4;
  __m256d v;

  static Pack load(const double* p) { return {_mm256_loadu_pd(p)}; }
  void store(double* p) const { _mm256_storeu_pd(p, v); }
  static Pack set1(double x) { return {_mm256_set1_pd(x)}; }
  static Pack zero() { return {_mm256_setzero_pd()}; }

  friend Pack operator+(Pack a, Pack b) { return {_mm256_add_pd(a.v, b.v)}; }
  friend Pack operator-(Pack a, Pack b) { return {_mm256_sub_pd(a.v, b.v)}; }
  friend Pack operator*(Pack a, Pack b) { return {_mm256_mul_pd(a.v, b.v)}; }
  friend Pack operator/(Pack a, Pack b) { return {_mm256_div_pd(a.v, b.v)}; }
};

inline Pack<double, 4> fmadd(Pack<double, 4> a, Pack<double, 4> b, Pack<double, 4> c) {
  return {_mm256_fmadd_pd(a.v, b.v, c.v)};
}
inline Pack<double, 4> fnmadd(Pack<double, 4> a, Pack<double, 4> b, Pack<double, 4> c) {
  return {_mm256_fnmadd_pd(a.v, b.v, c.v)};
}
inline Pack<double, 4> rint(Pack<double, 4> a) {
  return {_mm256_round_pd(a.v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC)};
}
inline Pack<double, 4> max(Pack<double, 4> a, Pack<double, 4> b) {
  return {_mm256_max_pd(a.v, b.v)};
}
inline Pack<double, 4> min(Pack<double, 4> a, Pack<double, 4> b) {
  return {_mm256_min_pd(a.v, b.v)};
}
inline Pack<double, 4> abs(Pack<double, 4> a) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  return {_mm256_and_pd(a.v, mask)};
}
inline Pack<double, 4> copysign_pack(Pack<double, 4> mag, Pack<double, 4> sgn) {
  const __m256d smask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x8000000000000000ULL));
  return {_mm256_or_pd(_mm256_andnot_pd(smask, mag.v), _mm256_and_pd(smask, sgn.v))};
}
inline Pack<double, 4> select_nonneg(Pack<double, 4> z, Pack<double, 4> a, Pack<double, 4> b) {
  const __m256d m = _mm256_cmp_pd(z.v, _mm256_setzero_pd(), _CMP_GE_OQ);
  return {_mm256_blendv_pd(b.v, a.v, m)};
}
inline Pack<double, 4> splat_int_pow2(Pack<double, 4> k) {
  const __m256d magic = _mm256_set1_pd(6755399441055744.0);
  const __m256i mb = _mm256_castpd_si256(magic);
  const __m256i kb = _mm256_castpd_si256(_mm256_add_pd(k.v, magic));
  const __m256i ki = _mm256_sub_epi64(kb, mb);
  const __m256i e = _mm256_slli_epi64(_mm256_add_epi64(ki, _mm256_set1_epi64x(1023)), 52);
  return {_mm256_castsi256_pd(e)};
}

template <>
struct Pack<float, 8> {
  using value_type = float;
  static constexpr int width = 8;
  __m256 v;

  static Pack load(const float* p) { return {_mm256_loadu_ps(p)}; }
  void store(float* p) const { _mm256_storeu_ps(p, v); }
  static Pack set1(float x) { return {_mm256_set1_ps(x)}; }
  static Pack zero() { return {_mm256_setzero_ps()}; }

  friend Pack operator+(Pack a, Pack b) { return {_mm256_add_ps(a.v, b.v)}; }
  friend Pack operator-(Pack a, Pack b) { return {_mm256_sub_ps(a.v, b.v)}; }
  friend Pack operator*(Pack a, Pack b) { return {_mm256_mul_ps(a.v, b.v)}; }
  friend Pack operator/(Pack a, Pack b) { return {_mm256_div_ps(a.v, b.v)}; }
};

inline Pack<float, 8> fmadd(Pack<float, 8> a, Pack<float, 8> b, Pack<float, 8> c) {
  return {_mm256_fmadd_ps(a.v, b.v, c.v)};
}

struct WidePair8 {
  Pack<double, 4> lo, hi;
};
inline WidePair8 widen(Pack<float, 8> a) {
  return {{_mm256_cvtps_pd(_mm256_castps256_ps128(a.v))},
          {_mm256_cvtps_pd(_mm256_extractf128_ps(a.v, 1))}};
}
inline Pack<float, 8> narrow(WidePair8 w) {
  const __m128 lo = _mm256_cvtpd_ps(w.lo.v);
  const __m128 hi = _mm256_cvtpd_ps(w.hi.v);
  return {_mm256_insertf128_ps(_mm256_castps128_ps256(lo), hi, 1)};
}

#endif  // __AVX2__

// --------------------------------------------------------------- AVX-512 --

#if defined(__AVX512F__)

template <>
struct Pack<double, 8> {
  using value_type = double;
  static constexpr int width = 8;
  __m512d v;

  static Pack load(const double* p) { return {_mm512_loadu_pd(p)}; }
  void store(double* p) const { _mm512_storeu_pd(p, v); }
  static Pack set1(double x) { return {_mm512_set1_pd(x)}; }
  static Pack zero() { return {_mm512_setzero_pd()}; }

  friend Pack operator+(Pack a, Pack b) { return {_mm512_add_pd(a.v, b.v)}; }
  friend Pack operator-(Pack a, Pack b) { return {_mm512_sub_pd(a.v, b.v)}; }
  friend Pack operator*(Pack a, Pack b) { return {_mm512_mul_pd(a.v, b.v)}; }
  friend Pack operator/(Pack a, Pack b) { return {_mm512_div_pd(a.v, b.v)}; }
};

inline Pack<double, 8> fmadd(Pack<double, 8> a, Pack<double, 8> b, Pack<double, 8> c) {
  return {_mm512_fmadd_pd(a.v, b.v, c.v)};
}
inline Pack<double, 8> fnmadd(Pack<double, 8> a, Pack<double, 8> b, Pack<double, 8> c) {
  return {_mm512_fnmadd_pd(a.v, b.v, c.v)};
}
inline Pack<double, 8> rint(Pack<double, 8> a) {
  return {_mm512_roundscale_pd(a.v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC)};
}
inline Pack<double, 8> max(Pack<double, 8> a, Pack<double, 8> b) {
  return {_mm512_max_pd(a.v, b.v)};
}
inline Pack<double, 8> min(Pack<double, 8> a, Pack<double, 8> b) {
  return {_mm512_min_pd(a.v, b.v)};
}
inline Pack<double, 8> abs(Pack<double, 8> a) { return {_mm512_abs_pd(a.v)}; }
inline Pack<double, 8> copysign_pack(Pack<double, 8> mag, Pack<double, 8> sgn) {
  const __m512i smask = _mm512_set1_epi64(0x8000000000000000ULL);
  return {_mm512_castsi512_pd(_mm512_ternarylogic_epi64(
      _mm512_castpd_si512(mag.v), _mm512_castpd_si512(sgn.v), smask, 0xd8))};
}
inline Pack<double, 8> select_nonneg(Pack<double, 8> z, Pack<double, 8> a, Pack<double, 8> b) {
  const __mmask8 m = _mm512_cmp_pd_mask(z.v, _mm512_setzero_pd(), _CMP_GE_OQ);
  return {_mm512_mask_blend_pd(m, b.v, a.v)};
}
inline Pack<double, 8> splat_int_pow2(Pack<double, 8> k) {
  const __m512d magic = _mm512_set1_pd(6755399441055744.0);
  const __m512i mb = _mm512_castpd_si512(magic);
  const __m512i kb = _mm512_castpd_si512(_mm512_add_pd(k.v, magic));
  const __m512i ki = _mm512_sub_epi64(kb, mb);
  const __m512i e = _mm512_slli_epi64(_mm512_add_epi64(ki, _mm512_set1_epi64(1023)), 52);
  return {_mm512_castsi512_pd(e)};
}

template <>
struct Pack<float, 16> {
  using value_type = float;
  static constexpr int width = 16;
  __m512 v;

  static Pack load(const float* p) { return {_mm512_loadu_ps(p)}; }
  void store(float* p) const { _mm512_storeu_ps(p, v); }
  static Pack set1(float x) { return {_mm512_set1_ps(x)}; }
  static Pack zero() { return {_mm512_setzero_ps()}; }

  friend Pack operator+(Pack a, Pack b) { return {_mm512_add_ps(a.v, b.v)}; }
  friend Pack operator-(Pack a, Pack b) { return {_mm512_sub_ps(a.v, b.v)}; }
  friend Pack operator*(Pack a, Pack b) { return {_mm512_mul_ps(a.v, b.v)}; }
  friend Pack operator/(Pack a, Pack b) { return {_mm512_div_ps(a.v, b.v)}; }
};

inline Pack<float, 16> fmadd(Pack<float, 16> a, Pack<float, 16> b, Pack<float, 16> c) {
  return {_mm512_fmadd_ps(a.v, b.v, c.v)};
}

struct WidePair16 {
  Pack<double, 8> lo, hi;
};
inline WidePair16 widen(Pack<float, 16> a) {
  return {{_mm512_cvtps_pd(_mm512_castps512_ps256(a.v))},
          {_mm512_cvtps_pd(_mm512_extractf32x8_ps(a.v, 1))}};
}
inline Pack<float, 16> narrow(WidePair16 w) {
  const __m256 lo = _mm512_cvtpd_ps(w.lo.v);
  const __m256 hi = _mm512_cvtpd_ps(w.hi.v);
  return {_mm512_insertf32x8(_mm512_castps256_ps512(lo), hi, 1)};
}

#endif  // __AVX512F__

// ------------------------------------------------------------- math core --

// exp(x) for double packs, exact enough for activation chains (~1 ulp poly +
// exactly-representable argument split). Inputs are clamped to [-746, 746]:
// below that exp underflows to 0 through denormals, our callers only pass
// nonpositive arguments, and the two-step power-of-two scaling keeps every
// intermediate exponent in the normal range.
template <class P>
inline P exp_pack(P x) {
  x = min(max(x, P::set1(-746.0)), P::set1(746.0));
  const P log2e = P::set1(1.4426950408889634074);
  const P ln2_hi = P::set1(6.93145751953125e-1);
  const P ln2_lo = P::set1(1.42860682030941723212e-6);
  const P k = rint(x * log2e);
  P r = fnmadd(k, ln2_hi, x);
  r = fnmadd(k, ln2_lo, r);

  P p = P::set1(1.6059043836821614599e-10);       // 1/13!
  p = fmadd(p, r, P::set1(2.0876756987868098979e-9));
  p = fmadd(p, r, P::set1(2.5052108385441718775e-8));
  p = fmadd(p, r, P::set1(2.7557319223985890653e-7));
  p = fmadd(p, r, P::set1(2.7557319223985890653e-6));
  p = fmadd(p, r, P::set1(2.4801587301587301587e-5));
  p = fmadd(p, r, P::set1(1.9841269841269841270e-4));
  p = fmadd(p, r, P::set1(1.3888888888888888889e-3));
  p = fmadd(p, r, P::set1(8.3333333333333333333e-3));
  p = fmadd(p, r, P::set1(4.1666666666666666667e-2));
  p = fmadd(p, r, P::set1(1.6666666666666666667e-1));
  p = fmadd(p, r, P::set1(0.5));
  P e = fmadd(r, fmadd(r, p, P::set1(1.0)), P::set1(1.0));

  // two-step 2^k scaling via the biased split k = (k1b-1024) + (k2b-1024)
  const P kb = k + P::set1(2048.0);
  const P k1b = rint(fmadd(kb, P::set1(0.5), P::set1(-0.25)));  // floor(kb/2)
  const P k2b = kb - k1b;
  const P s1 = splat_int_pow2(k1b - P::set1(1024.0));
  const P s2 = splat_int_pow2(k2b - P::set1(1024.0));
  return (e * s1) * s2;
}

// Activation value and first three derivatives for a double pack of
// pre-activations. Same closed forms as activation_eval().
template <class P>
struct ActQuad {
  P rho, d1, d2, d3;
};

template <class P>
inline ActQuad<P> act_quad(ActivationKind kind, P z) {
  ActQuad<P> out;
  const P one = P::set1(1.0);
  if (kind == ActivationKind::Tanh) {
    const P a = abs(z);
    const P e = exp_pack(P::set1(-2.0) * a);
    const P den = one + e;
    const P mag = (one - e) / den;
    const P rho = copysign_pack(mag, z);
    const P d1 = (P::set1(4.0) * e) / (den * den);
    out.rho = rho;
    out.d1 = d1;
    out.d2 = P::set1(-2.0) * rho * d1;
    out.d3 = fmadd(P::set1(6.0) * rho, rho, P::set1(-2.0)) * d1;
  } else {
    const P a = abs(z);
    const P e = exp_pack(P::zero() - a);
    const P den = one + e;
    const P rho = select_nonneg(z, one, e) / den;
    const P d1 = e / (den * den);
    out.rho = rho;
    out.d1 = d1;
    out.d2 = d1 * (one - P::set1(2.0) * rho);
    out.d3 = d1 * fmadd(P::set1(6.0) * rho, rho, fnmadd(P::set1(6.0), rho, one));
  }
  return out;
}

}  // namespace cpinn::simd
