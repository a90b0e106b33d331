#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpinn/mlp.hpp"

namespace cpinn {

// Value, input gradient and Laplacian of a scalar field at one point. The
// reference path also exposes the per-coordinate second directional
// derivatives whose sum is the Laplacian (certificate tests use them).
template <class Real>
struct FieldEval {
  Real value = Real(0);
  std::vector<Real> gradient;
  Real laplacian = Real(0);
  std::vector<Real> second_derivs;
};

// Reverse-pass weights: d/dtheta [w_value*value + w_gradient.gradient
// + w_laplacian*laplacian].
template <class Real>
struct Cotangent {
  Real w_value = Real(0);
  std::vector<Real> w_gradient;  // empty means zero
  Real w_laplacian = Real(0);
};

// Scalar reference path. Propagates (value, Jacobian row, per-coordinate
// second directional derivatives) through the layers; the Laplacian is the
// sum of the second directional derivatives along the d coordinate axes.
// Exact to floating-point roundoff: no finite differences anywhere.
//
// The workspace keeps the per-layer tape (activation derivatives and the
// pre-activation first/second directional derivatives), so a forward pass
// can be followed by a reverse pass for parameter gradients.
template <class Real>
class RefWorkspace {
 public:
  void forward(const Mlp<Real>& net, std::span<const Real> x) {
    const MlpShape& s = net.shape;
    const int d = s.input_dim();
    if (static_cast<int>(x.size()) != d)
      throw std::invalid_argument("eval point has dimension " + std::to_string(x.size()) +
                                  ", network expects " + std::to_string(d));
    const int L = s.depth();
    resize(s);
    x_.assign(x.begin(), x.end());

    // h/J/S of the previous layer, starting at the input: h=x, J=I, S=0.
    h_in_.assign(x.begin(), x.end());
    J_in_.assign(static_cast<std::size_t>(d) * d, Real(0));
    for (int p = 0; p < d; ++p) J_in_[static_cast<std::size_t>(p) * d + p] = Real(1);
    S_in_.assign(static_cast<std::size_t>(d) * d, Real(0));

    for (int l = 0; l < L - 1; ++l) {
      const int nin = s.widths[l];
      const int nout = s.widths[l + 1];
      const Real* W = net.weights(l);
      const Real* b = net.biases(l);
      Layer& T = tape_[l];
      h_out_.resize(nout);
      J_out_.assign(static_cast<std::size_t>(nout) * d, Real(0));
      S_out_.assign(static_cast<std::size_t>(nout) * d, Real(0));
      for (int q = 0; q < nout; ++q) {
        const Real* wrow = W + static_cast<std::size_t>(q) * nin;
        Real z = b[q];
        for (int j = 0; j < nin; ++j) z += wrow[j] * h_in_[j];
        const ActDerivs a = activation_eval(s.activation, static_cast<double>(z));
        T.rho[q] = static_cast<Real>(a.rho);
        T.d1[q] = static_cast<Real>(a.d1);
        T.d2[q] = static_cast<Real>(a.d2);
        T.d3[q] = static_cast<Real>(a.d3);
        for (int p = 0; p < d; ++p) {
          Real zh = Real(0), zd = Real(0);
          for (int j = 0; j < nin; ++j) {
            zh += wrow[j] * J_in_[static_cast<std::size_t>(j) * d + p];
            zd += wrow[j] * S_in_[static_cast<std::size_t>(j) * d + p];
          }
          T.zhat[static_cast<std::size_t>(q) * d + p] = zh;
          T.zddot[static_cast<std::size_t>(q) * d + p] = zd;
          J_out_[static_cast<std::size_t>(q) * d + p] = T.d1[q] * zh;
          S_out_[static_cast<std::size_t>(q) * d + p] = T.d2[q] * zh * zh + T.d1[q] * zd;
        }
        h_out_[q] = T.rho[q];
      }
      h_in_.swap(h_out_);
      J_in_.swap(J_out_);
      S_in_.swap(S_out_);
    }

    // affine output layer
    const int nin = s.widths[L - 1];
    const Real* W = net.weights(L - 1);
    const Real* b = net.biases(L - 1);
    Real v = b[0];
    for (int j = 0; j < nin; ++j) v += W[j] * h_in_[j];
    value_ = v;
    gradient_.assign(d, Real(0));
    second_derivs_.assign(d, Real(0));
    laplacian_ = Real(0);
    for (int p = 0; p < d; ++p) {
      Real g = Real(0), sp = Real(0);
      for (int j = 0; j < nin; ++j) {
        g += W[j] * J_in_[static_cast<std::size_t>(j) * d + p];
        sp += W[j] * S_in_[static_cast<std::size_t>(j) * d + p];
      }
      gradient_[p] = g;
      second_derivs_[p] = sp;
      laplacian_ += sp;
    }
  }

  Real value() const { return value_; }
  std::span<const Real> gradient() const { return gradient_; }
  Real laplacian() const { return laplacian_; }

  FieldEval<Real> result() const {
    FieldEval<Real> out;
    out.value = value_;
    out.gradient = gradient_;
    out.laplacian = laplacian_;
    out.second_derivs = second_derivs_;
    return out;
  }

  // Accumulates d/dtheta [cot.w_value*value + cot.w_gradient.gradient +
  // cot.w_laplacian*laplacian] into grad (+=). Must follow a forward() on
  // the same net and point.
  void backward(const Mlp<Real>& net, const Cotangent<Real>& cot, std::span<Real> grad) {
    const MlpShape& s = net.shape;
    const int d = s.input_dim();
    const int L = s.depth();
    if (grad.size() != s.param_count)
      throw std::invalid_argument("gradient buffer length " + std::to_string(grad.size()) +
                                  " does not match parameter count " +
                                  std::to_string(s.param_count));
    if (!cot.w_gradient.empty() && static_cast<int>(cot.w_gradient.size()) != d)
      throw std::invalid_argument("cotangent gradient weight has dimension " +
                                  std::to_string(cot.w_gradient.size()) + ", expected " +
                                  std::to_string(d));

    // Adjoints of the output layer's inputs.
    const int n_last = s.widths[L - 1];
    hb_.assign(n_last, Real(0));
    Jb_.assign(static_cast<std::size_t>(n_last) * d, Real(0));
    Sb_.assign(static_cast<std::size_t>(n_last) * d, Real(0));

    // Rebuild h/J/S of layer L-2 outputs (inputs to the output layer).
    in_fields(net, L - 1);

    const Real* W = net.weights(L - 1);
    Real* gW = grad.data() + s.weight_off[L - 1];
    Real* gb = grad.data() + s.bias_off[L - 1];
    const Real wv = cot.w_value;
    const Real wl = cot.w_laplacian;
    gb[0] += wv;
    for (int j = 0; j < n_last; ++j) {
      Real acc = wv * h_in_[j];
      Real ssum = Real(0);
      for (int p = 0; p < d; ++p) ssum += S_in_[static_cast<std::size_t>(j) * d + p];
      acc += wl * ssum;
      if (!cot.w_gradient.empty())
        for (int p = 0; p < d; ++p)
          acc += cot.w_gradient[p] * J_in_[static_cast<std::size_t>(j) * d + p];
      gW[j] += acc;
      hb_[j] = W[j] * wv;
      for (int p = 0; p < d; ++p) {
        Jb_[static_cast<std::size_t>(j) * d + p] =
            cot.w_gradient.empty() ? Real(0) : W[j] * cot.w_gradient[p];
        Sb_[static_cast<std::size_t>(j) * d + p] = W[j] * wl;
      }
    }

    for (int l = L - 2; l >= 0; --l) {
      const int nin = s.widths[l];
      const int nout = s.widths[l + 1];
      const Layer& T = tape_[l];
      in_fields(net, l);  // h/J/S of the inputs to layer l
      const Real* Wl = net.weights(l);
      Real* gWl = grad.data() + s.weight_off[l];
      Real* gbl = grad.data() + s.bias_off[l];
      zb_.assign(nout, Real(0));
      zhb_.assign(static_cast<std::size_t>(nout) * d, Real(0));
      zdb_.assign(static_cast<std::size_t>(nout) * d, Real(0));
      for (int q = 0; q < nout; ++q) {
        Real zb = T.d1[q] * hb_[q];
        for (int p = 0; p < d; ++p) {
          const std::size_t qp = static_cast<std::size_t>(q) * d + p;
          const Real zh = T.zhat[qp];
          const Real zd = T.zddot[qp];
          const Real jb = Jb_[qp];
          const Real sb = Sb_[qp];
          zhb_[qp] = T.d1[q] * jb + Real(2) * T.d2[q] * zh * sb;
          zdb_[qp] = T.d1[q] * sb;
          zb += T.d2[q] * zh * jb + (T.d3[q] * zh * zh + T.d2[q] * zd) * sb;
        }
        zb_[q] = zb;
        gbl[q] += zb;
        Real* grow = gWl + static_cast<std::size_t>(q) * nin;
        for (int j = 0; j < nin; ++j) {
          Real acc = zb * h_in_[j];
          for (int p = 0; p < d; ++p) {
            const std::size_t qp = static_cast<std::size_t>(q) * d + p;
            const std::size_t jp = static_cast<std::size_t>(j) * d + p;
            acc += zhb_[qp] * J_in_[jp] + zdb_[qp] * S_in_[jp];
          }
          grow[j] += acc;
        }
      }
      // adjoints of this layer's inputs
      hb_.assign(nin, Real(0));
      Jb_.assign(static_cast<std::size_t>(nin) * d, Real(0));
      Sb_next_.assign(static_cast<std::size_t>(nin) * d, Real(0));
      for (int q = 0; q < nout; ++q) {
        const Real* wrow = Wl + static_cast<std::size_t>(q) * nin;
        for (int j = 0; j < nin; ++j) {
          hb_[j] += wrow[j] * zb_[q];
          for (int p = 0; p < d; ++p) {
            Jb_[static_cast<std::size_t>(j) * d + p] +=
                wrow[j] * zhb_[static_cast<std::size_t>(q) * d + p];
            Sb_next_[static_cast<std::size_t>(j) * d + p] +=
                wrow[j] * zdb_[static_cast<std::size_t>(q) * d + p];
          }
        }
      }
      Sb_.swap(Sb_next_);
    }
  }

 private:
  struct Layer {
    std::vector<Real> rho, d1, d2, d3;  // width
    std::vector<Real> zhat, zddot;      // width x d
  };

  void resize(const MlpShape& s) {
    const int L = s.depth();
    const int d = s.input_dim();
    tape_.resize(L - 1);
    for (int l = 0; l < L - 1; ++l) {
      const std::size_t w = s.widths[l + 1];
      tape_[l].rho.resize(w);
      tape_[l].d1.resize(w);
      tape_[l].d2.resize(w);
      tape_[l].d3.resize(w);
      tape_[l].zhat.resize(w * d);
      tape_[l].zddot.resize(w * d);
    }
  }

  // Reconstructs h/J/S of the inputs to layer l into h_in_/J_in_/S_in_.
  void in_fields(const Mlp<Real>& net, int l) {
    const MlpShape& s = net.shape;
    const int d = s.input_dim();
    if (l == 0) {
      h_in_ = x_;
      J_in_.assign(static_cast<std::size_t>(d) * d, Real(0));
      for (int p = 0; p < d; ++p) J_in_[static_cast<std::size_t>(p) * d + p] = Real(1);
      S_in_.assign(static_cast<std::size_t>(d) * d, Real(0));
      return;
    }
    const Layer& T = tape_[l - 1];
    const int w = s.widths[l];
    h_in_.assign(T.rho.begin(), T.rho.end());
    J_in_.resize(static_cast<std::size_t>(w) * d);
    S_in_.resize(static_cast<std::size_t>(w) * d);
    for (int q = 0; q < w; ++q)
      for (int p = 0; p < d; ++p) {
        const std::size_t qp = static_cast<std::size_t>(q) * d + p;
        const Real zh = T.zhat[qp];
        J_in_[qp] = T.d1[q] * zh;
        S_in_[qp] = T.d2[q] * zh * zh + T.d1[q] * T.zddot[qp];
      }
  }

  std::vector<Layer> tape_;
  std::vector<Real> x_;
  std::vector<Real> h_in_, J_in_, S_in_;
  std::vector<Real> h_out_, J_out_, S_out_;
  std::vector<Real> hb_, Jb_, Sb_, Sb_next_;
  std::vector<Real> zb_, zhb_, zdb_;
  Real value_ = Real(0);
  std::vector<Real> gradient_;
  std::vector<Real> second_derivs_;
  Real laplacian_ = Real(0);
};

template <class Real>
FieldEval<Real> eval_field(const Mlp<Real>& net, std::span<const Real> x) {
  RefWorkspace<Real> ws;
  ws.forward(net, x);
  return ws.result();
}

// Flat parameter gradient of w_v*value + w_g.gradient + w_lap*laplacian.
template <class Real>
std::vector<Real> param_gradient(const Mlp<Real>& net, std::span<const Real> x,
                                 const Cotangent<Real>& cot) {
  RefWorkspace<Real> ws;
  ws.forward(net, x);
  std::vector<Real> grad(net.param_count(), Real(0));
  ws.backward(net, cot, grad);
  return grad;
}

}  // namespace cpinn
