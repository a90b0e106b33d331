#pragma once

// Generic lane-kernel template. Included only by the per-architecture
// translation units (scalar / AVX2 / AVX-512), which instantiate it with the
// matching Pack type under the matching compiler flags.

#include <cstring>
#include <memory>
#include <type_traits>

#include "cpinn/kernels.hpp"
#include "cpinn/simd_pack.hpp"

namespace cpinn::detail {

constexpr int kMaxDim = 8;  // spatial dimension cap for register accumulators

template <class PF>
inline simd::ActQuad<PF> act_quad_any(ActivationKind kind, PF z) {
  if constexpr (std::is_same_v<typename PF::value_type, double>) {
    return simd::act_quad(kind, z);
  } else {
    // float lanes: activation chain evaluated in double, then narrowed
    auto wp = simd::widen(z);
    auto lo = simd::act_quad(kind, wp.lo);
    if constexpr (requires { wp.hi; }) {
      auto hi = simd::act_quad(kind, wp.hi);
      return {simd::narrow({lo.rho, hi.rho}), simd::narrow({lo.d1, hi.d1}),
              simd::narrow({lo.d2, hi.d2}), simd::narrow({lo.d3, hi.d3})};
    } else {
      return {simd::narrow({lo.rho}), simd::narrow({lo.d1}), simd::narrow({lo.d2}),
              simd::narrow({lo.d3})};
    }
  }
}

template <class P>
class LaneKernel final : public FieldKernel<typename P::value_type> {
 public:
  using Real = typename P::value_type;
  static constexpr int W = P::width;

  explicit LaneKernel(const char* name) : name_(name) {}

  const char* name() const override { return name_; }
  int width() const override { return W; }

  // Tape per group: for each hidden layer (output width w):
  //   h, d1, d2, d3                       4*w*W
  //   zhat, zddot ([q][p][W])             2*w*d*W
  std::size_t tape_reals(const MlpShape& s) const override {
    const int d = s.input_dim();
    std::size_t n = 0;
    for (int l = 0; l < s.depth() - 1; ++l)
      n += static_cast<std::size_t>(s.widths[l + 1]) * W * (4 + 2 * d);
    return n;
  }

  // Value-only tape: h and d1 per hidden layer.
  std::size_t value_tape_reals(const MlpShape& s) const override {
    std::size_t n = 0;
    for (int l = 0; l < s.depth() - 1; ++l)
      n += static_cast<std::size_t>(s.widths[l + 1]) * W * 2;
    return n;
  }

  // Three (h, J, S) triples: forward ping-pong plus backward reconstruction.
  std::size_t scratch_reals(const MlpShape& s) const override {
    const int d = s.input_dim();
    const std::size_t mw = s.max_width();
    return 3 * mw * W * (1 + 2 * static_cast<std::size_t>(d));
  }

  void forward_group(const MlpShape& s, const Real* params, const Real* xg, Real* tape,
                     Real* scratch, Real* out_v, Real* out_g, Real* out_lap) const override {
    const int L = s.depth();
    const int d = s.input_dim();
    const std::size_t mw = s.max_width();

    Real* h_a = scratch;
    Real* h_b = h_a + mw * W;
    Real* J_a = h_b + mw * W;
    Real* J_b = J_a + mw * d * W;
    Real* S_a = J_b + mw * d * W;
    Real* S_b = S_a + mw * d * W;

    const Real* h_in = xg;  // layer-0 inputs are the coordinates themselves
    Real* h_out = h_a;
    Real* J_in = J_a;
    Real* J_out = J_b;
    Real* S_in = S_a;
    Real* S_out = S_b;

    std::size_t toff = 0;
    for (int l = 0; l < L - 1; ++l) {
      const int nin = s.widths[l];
      const int nout = s.widths[l + 1];
      const Real* Wl = params + s.weight_off[l];
      const Real* bl = params + s.bias_off[l];
      Real* t_h = tape + toff;
      Real* t_d1 = t_h + static_cast<std::size_t>(nout) * W;
      Real* t_d2 = t_d1 + static_cast<std::size_t>(nout) * W;
      Real* t_d3 = t_d2 + static_cast<std::size_t>(nout) * W;
      Real* t_zh = t_d3 + static_cast<std::size_t>(nout) * W;
      Real* t_zd = t_zh + static_cast<std::size_t>(nout) * d * W;
      toff += static_cast<std::size_t>(nout) * W * (4 + 2 * d);

      for (int q = 0; q < nout; ++q) {
        const Real* wrow = Wl + static_cast<std::size_t>(q) * nin;
        P z = P::set1(bl[q]);
        P zh[kMaxDim], zd[kMaxDim];
        if (l == 0) {
          for (int j = 0; j < nin; ++j)
            z = fmadd(P::set1(wrow[j]), P::load(xg + static_cast<std::size_t>(j) * W), z);
          for (int p = 0; p < d; ++p) {
            zh[p] = P::set1(wrow[p]);
            zd[p] = P::zero();
          }
        } else {
          for (int p = 0; p < d; ++p) {
            zh[p] = P::zero();
            zd[p] = P::zero();
          }
          for (int j = 0; j < nin; ++j) {
            const P wj = P::set1(wrow[j]);
            z = fmadd(wj, P::load(h_in + static_cast<std::size_t>(j) * W), z);
            const Real* Jrow = J_in + static_cast<std::size_t>(j) * d * W;
            const Real* Srow = S_in + static_cast<std::size_t>(j) * d * W;
            for (int p = 0; p < d; ++p) {
              zh[p] = fmadd(wj, P::load(Jrow + static_cast<std::size_t>(p) * W), zh[p]);
              zd[p] = fmadd(wj, P::load(Srow + static_cast<std::size_t>(p) * W), zd[p]);
            }
          }
        }
        const simd::ActQuad<P> a = act_quad_any(s.activation, z);
        a.rho.store(t_h + static_cast<std::size_t>(q) * W);
        a.d1.store(t_d1 + static_cast<std::size_t>(q) * W);
        a.d2.store(t_d2 + static_cast<std::size_t>(q) * W);
        a.d3.store(t_d3 + static_cast<std::size_t>(q) * W);
        a.rho.store(h_out + static_cast<std::size_t>(q) * W);
        for (int p = 0; p < d; ++p) {
          const std::size_t qp = (static_cast<std::size_t>(q) * d + p) * W;
          zh[p].store(t_zh + qp);
          zd[p].store(t_zd + qp);
          const P Jqp = a.d1 * zh[p];
          const P Sqp = fmadd(a.d2 * zh[p], zh[p], a.d1 * zd[p]);
          Jqp.store(J_out + qp);
          Sqp.store(S_out + qp);
        }
      }
      h_in = h_out;
      h_out = (h_out == h_a) ? h_b : h_a;
      std::swap(J_in, J_out);
      std::swap(S_in, S_out);
    }

    // affine output layer
    const int nin = s.widths[L - 1];
    const Real* Wl = params + s.weight_off[L - 1];
    const Real* bl = params + s.bias_off[L - 1];
    P v = P::set1(bl[0]);
    for (int j = 0; j < nin; ++j)
      v = fmadd(P::set1(Wl[j]), P::load(h_in + static_cast<std::size_t>(j) * W), v);
    v.store(out_v);
    P lap = P::zero();
    for (int p = 0; p < d; ++p) {
      P g = P::zero();
      P sp = P::zero();
      if (L == 1) {
        g = P::set1(Wl[p]);  // pure affine net: gradient is the weight row
      } else {
        for (int j = 0; j < nin; ++j) {
          const std::size_t jp = (static_cast<std::size_t>(j) * d + p) * W;
          const P wj = P::set1(Wl[j]);
          g = fmadd(wj, P::load(J_in + jp), g);
          sp = fmadd(wj, P::load(S_in + jp), sp);
        }
      }
      if (out_g) g.store(out_g + static_cast<std::size_t>(p) * W);
      lap = lap + sp;
    }
    lap.store(out_lap);
  }

  void backward_group(const MlpShape& s, const Real* params, const Real* xg, const Real* tape,
                      Real* scratch, const Real* cv, const Real* cg, const Real* cl,
                      Real* grad_lanes) const override {
    const int L = s.depth();
    const int d = s.input_dim();
    const std::size_t mw = s.max_width();

    Real* hb = scratch;
    Real* hb_next = hb + mw * W;
    Real* h_in = hb_next + mw * W;
    Real* Jb = h_in + mw * W;
    Real* Jb_next = Jb + mw * d * W;
    Real* Sb = Jb_next + mw * d * W;
    Real* Sb_next = Sb + mw * d * W;
    Real* J_in = Sb_next + mw * d * W;
    Real* S_in = J_in + mw * d * W;

    // tape offsets per hidden layer
    std::size_t toff[16];
    {
      std::size_t cur = 0;
      for (int l = 0; l < L - 1; ++l) {
        toff[l] = cur;
        cur += static_cast<std::size_t>(s.widths[l + 1]) * W * (4 + 2 * d);
      }
    }

    const P cvv = P::load(cv);
    const P cll = P::load(cl);

    // ---- output layer ----
    {
      const int nin = s.widths[L - 1];
      const Real* Wl = params + s.weight_off[L - 1];
      Real* gW = grad_lanes + s.weight_off[L - 1] * W;
      Real* gb = grad_lanes + s.bias_off[L - 1] * W;
      load_inputs(s, xg, tape, toff, L - 1, h_in, J_in, S_in);
      for (int j = 0; j < nin; ++j) {
        P acc = cvv * P::load(h_in + static_cast<std::size_t>(j) * W);
        if (L == 1) {
          // inputs are (x, I, 0): gradient cotangent hits weight j directly
          if (cg && j < d) acc = acc + P::load(cg + static_cast<std::size_t>(j) * W);
        } else {
          P ssum = P::zero();
          for (int p = 0; p < d; ++p) {
            const std::size_t jp = (static_cast<std::size_t>(j) * d + p) * W;
            ssum = ssum + P::load(S_in + jp);
            if (cg)
              acc = fmadd(P::load(cg + static_cast<std::size_t>(p) * W), P::load(J_in + jp), acc);
          }
          acc = fmadd(cll, ssum, acc);
        }
        const std::size_t goff = static_cast<std::size_t>(j) * W;
        (P::load(gW + goff) + acc).store(gW + goff);
        // input adjoints
        const P wj = P::set1(Wl[j]);
        (wj * cvv).store(hb + goff);
        for (int p = 0; p < d; ++p) {
          const std::size_t jp = (static_cast<std::size_t>(j) * d + p) * W;
          const P jbv = cg ? wj * P::load(cg + static_cast<std::size_t>(p) * W) : P::zero();
          jbv.store(Jb + jp);
          (wj * cll).store(Sb + jp);
        }
      }
      (P::load(gb) + cvv).store(gb);
    }

    // ---- hidden layers, reverse ----
    for (int l = L - 2; l >= 0; --l) {
      const int nin = s.widths[l];
      const int nout = s.widths[l + 1];
      const Real* Wl = params + s.weight_off[l];
      Real* gW = grad_lanes + s.weight_off[l] * W;
      Real* gb = grad_lanes + s.bias_off[l] * W;
      const Real* t_h = tape + toff[l];
      const Real* t_d1 = t_h + static_cast<std::size_t>(nout) * W;
      const Real* t_d2 = t_d1 + static_cast<std::size_t>(nout) * W;
      const Real* t_d3 = t_d2 + static_cast<std::size_t>(nout) * W;
      const Real* t_zh = t_d3 + static_cast<std::size_t>(nout) * W;
      const Real* t_zd = t_zh + static_cast<std::size_t>(nout) * d * W;

      load_inputs(s, xg, tape, toff, l, h_in, J_in, S_in);

      // zero the input adjoints
      std::memset(hb_next, 0, sizeof(Real) * static_cast<std::size_t>(nin) * W);
      std::memset(Jb_next, 0, sizeof(Real) * static_cast<std::size_t>(nin) * d * W);
      std::memset(Sb_next, 0, sizeof(Real) * static_cast<std::size_t>(nin) * d * W);

      for (int q = 0; q < nout; ++q) {
        const P d1q = P::load(t_d1 + static_cast<std::size_t>(q) * W);
        const P d2q = P::load(t_d2 + static_cast<std::size_t>(q) * W);
        const P d3q = P::load(t_d3 + static_cast<std::size_t>(q) * W);
        P zbq = d1q * P::load(hb + static_cast<std::size_t>(q) * W);
        P zhb[kMaxDim], zdb[kMaxDim];
        for (int p = 0; p < d; ++p) {
          const std::size_t qp = (static_cast<std::size_t>(q) * d + p) * W;
          const P zh = P::load(t_zh + qp);
          const P zd = P::load(t_zd + qp);
          const P jb = P::load(Jb + qp);
          const P sb = P::load(Sb + qp);
          zhb[p] = fmadd(P::set1(Real(2)) * d2q * zh, sb, d1q * jb);
          zdb[p] = d1q * sb;
          zbq = zbq + d2q * zh * jb + fmadd(d3q * zh, zh, d2q * zd) * sb;
        }
        const Real* wrow = Wl + static_cast<std::size_t>(q) * nin;
        Real* grow = gW + static_cast<std::size_t>(q) * nin * W;
        for (int j = 0; j < nin; ++j) {
          P acc = zbq * P::load(h_in + static_cast<std::size_t>(j) * W);
          if (l == 0) {
            if (j < d) acc = acc + zhb[j];  // J_in = identity, S_in = 0
          } else {
            for (int p = 0; p < d; ++p) {
              const std::size_t jp = (static_cast<std::size_t>(j) * d + p) * W;
              acc = fmadd(zhb[p], P::load(J_in + jp), acc);
              acc = fmadd(zdb[p], P::load(S_in + jp), acc);
            }
          }
          const std::size_t goff = static_cast<std::size_t>(j) * W;
          (P::load(grow + goff) + acc).store(grow + goff);
          // propagate adjoints to the layer inputs
          const P wj = P::set1(wrow[j]);
          (fmadd(wj, zbq, P::load(hb_next + goff))).store(hb_next + goff);
          for (int p = 0; p < d; ++p) {
            const std::size_t jp = (static_cast<std::size_t>(j) * d + p) * W;
            (fmadd(wj, zhb[p], P::load(Jb_next + jp))).store(Jb_next + jp);
            (fmadd(wj, zdb[p], P::load(Sb_next + jp))).store(Sb_next + jp);
          }
        }
        const std::size_t boff = static_cast<std::size_t>(q) * W;
        (P::load(gb + boff) + zbq).store(gb + boff);
      }
      std::swap(hb, hb_next);
      std::swap(Jb, Jb_next);
      std::swap(Sb, Sb_next);
    }
  }

  void forward_values_group(const MlpShape& s, const Real* params, const Real* xg, Real* tape,
                            Real* out_v) const override {
    const int L = s.depth();
    const Real* h_in = xg;
    std::size_t toff = 0;
    for (int l = 0; l < L - 1; ++l) {
      const int nin = s.widths[l];
      const int nout = s.widths[l + 1];
      const Real* Wl = params + s.weight_off[l];
      const Real* bl = params + s.bias_off[l];
      Real* t_h = tape + toff;
      Real* t_d1 = t_h + static_cast<std::size_t>(nout) * W;
      toff += static_cast<std::size_t>(nout) * W * 2;
      for (int q = 0; q < nout; ++q) {
        const Real* wrow = Wl + static_cast<std::size_t>(q) * nin;
        P z = P::set1(bl[q]);
        for (int j = 0; j < nin; ++j)
          z = fmadd(P::set1(wrow[j]), P::load(h_in + static_cast<std::size_t>(j) * W), z);
        const simd::ActQuad<P> a = act_quad_any(s.activation, z);
        a.rho.store(t_h + static_cast<std::size_t>(q) * W);
        a.d1.store(t_d1 + static_cast<std::size_t>(q) * W);
      }
      h_in = t_h;
    }
    const int nin = s.widths[L - 1];
    const Real* Wl = params + s.weight_off[L - 1];
    P v = P::set1(params[s.bias_off[L - 1]]);
    for (int j = 0; j < nin; ++j)
      v = fmadd(P::set1(Wl[j]), P::load(h_in + static_cast<std::size_t>(j) * W), v);
    v.store(out_v);
  }

  void backward_values_group(const MlpShape& s, const Real* params, const Real* xg,
                             const Real* tape, Real* scratch, const Real* cv,
                             Real* grad_lanes) const override {
    const int L = s.depth();
    const std::size_t mw = s.max_width();
    Real* hb = scratch;
    Real* hb_next = hb + mw * W;

    std::size_t toff[16];
    {
      std::size_t cur = 0;
      for (int l = 0; l < L - 1; ++l) {
        toff[l] = cur;
        cur += static_cast<std::size_t>(s.widths[l + 1]) * W * 2;
      }
    }

    const P cvv = P::load(cv);
    {
      const int nin = s.widths[L - 1];
      const Real* Wl = params + s.weight_off[L - 1];
      Real* gW = grad_lanes + s.weight_off[L - 1] * W;
      Real* gb = grad_lanes + s.bias_off[L - 1] * W;
      const Real* h_in = (L == 1) ? xg : tape + toff[L - 2];
      for (int j = 0; j < nin; ++j) {
        const std::size_t goff = static_cast<std::size_t>(j) * W;
        const P acc = cvv * P::load(h_in + goff);
        (P::load(gW + goff) + acc).store(gW + goff);
        (P::set1(Wl[j]) * cvv).store(hb + goff);
      }
      (P::load(gb) + cvv).store(gb);
    }

    for (int l = L - 2; l >= 0; --l) {
      const int nin = s.widths[l];
      const int nout = s.widths[l + 1];
      const Real* Wl = params + s.weight_off[l];
      Real* gW = grad_lanes + s.weight_off[l] * W;
      Real* gb = grad_lanes + s.bias_off[l] * W;
      const Real* t_h = tape + toff[l];
      const Real* t_d1 = t_h + static_cast<std::size_t>(nout) * W;
      const Real* h_in = (l == 0) ? xg : tape + toff[l - 1];

      std::memset(hb_next, 0, sizeof(Real) * static_cast<std::size_t>(nin) * W);
      for (int q = 0; q < nout; ++q) {
        const P zbq =
            P::load(t_d1 + static_cast<std::size_t>(q) * W) * P::load(hb + static_cast<std::size_t>(q) * W);
        const Real* wrow = Wl + static_cast<std::size_t>(q) * nin;
        Real* grow = gW + static_cast<std::size_t>(q) * nin * W;
        for (int j = 0; j < nin; ++j) {
          const std::size_t goff = static_cast<std::size_t>(j) * W;
          (fmadd(zbq, P::load(h_in + goff), P::load(grow + goff))).store(grow + goff);
          (fmadd(P::set1(wrow[j]), zbq, P::load(hb_next + goff))).store(hb_next + goff);
        }
        const std::size_t boff = static_cast<std::size_t>(q) * W;
        (P::load(gb + boff) + zbq).store(gb + boff);
      }
      std::swap(hb, hb_next);
    }
  }

  void reduce_grad_lanes(const Real* grad_lanes, std::size_t nparams,
                         Real* grad_out) const override {
    for (std::size_t i = 0; i < nparams; ++i) {
      Real sum = Real(0);
      for (int lane = 0; lane < W; ++lane) sum += grad_lanes[i * W + lane];
      grad_out[i] += sum;
    }
  }

 private:
  // Rebuilds h/J/S of the inputs to layer l into the given buffers.
  // For l == 0 callers special-case (x, I, 0); here only h matters then.
  void load_inputs(const MlpShape& s, const Real* xg, const Real* tape, const std::size_t* toff,
                   int l, Real* h_in, Real* J_in, Real* S_in) const {
    const int d = s.input_dim();
    if (l == 0) {
      std::memcpy(h_in, xg, sizeof(Real) * static_cast<std::size_t>(d) * W);
      return;
    }
    const int w = s.widths[l];
    const Real* t_h = tape + toff[l - 1];
    const Real* t_d1 = t_h + static_cast<std::size_t>(w) * W;
    const Real* t_d2 = t_d1 + static_cast<std::size_t>(w) * W;
    const Real* t_zh = t_d2 + 2 * static_cast<std::size_t>(w) * W;  // skip d3
    const Real* t_zd = t_zh + static_cast<std::size_t>(w) * d * W;
    std::memcpy(h_in, t_h, sizeof(Real) * static_cast<std::size_t>(w) * W);
    for (int q = 0; q < w; ++q) {
      const P d1q = P::load(t_d1 + static_cast<std::size_t>(q) * W);
      const P d2q = P::load(t_d2 + static_cast<std::size_t>(q) * W);
      for (int p = 0; p < d; ++p) {
        const std::size_t qp = (static_cast<std::size_t>(q) * d + p) * W;
        const P zh = P::load(t_zh + qp);
        const P zd = P::load(t_zd + qp);
        (d1q * zh).store(J_in + qp);
        (fmadd(d2q * zh, zh, d1q * zd)).store(S_in + qp);
      }
    }
  }

  const char* name_;
};

}  // namespace cpinn::detail
