#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cpinn/eval_ref.hpp"
#include "cpinn/mlp.hpp"
#include "test_util.hpp"

using namespace cpinn;
using namespace cpinn::test;

TEST_CASE("activation closed forms at 0") {
  auto t = activation_eval(ActivationKind::Tanh, 0.0);
  CHECK(t.rho == 0.0);
  CHECK(t.d1 == 1.0);
  CHECK(t.d2 == 0.0);
  CHECK(t.d3 == -2.0);

  auto s = activation_eval(ActivationKind::Sigmoid, 0.0);
  CHECK(s.rho == 0.5);
  CHECK(s.d1 == 0.25);
  CHECK(s.d2 == 0.0);
  CHECK(s.d3 == doctest::Approx(-0.125).epsilon(1e-15));
}

TEST_CASE("activation saturation is smooth and total") {
  auto t = activation_eval(ActivationKind::Tanh, 20.0);
  CHECK(std::fabs(t.rho - 1.0) < 1e-12);
  CHECK(std::fabs(t.d1) < 1e-12);
  CHECK(std::fabs(t.d2) < 1e-12);
  CHECK(std::fabs(t.d3) < 1e-12);

  for (double v : {700.0, -700.0, 1e6, -1e6}) {
    for (auto kind : {ActivationKind::Tanh, ActivationKind::Sigmoid}) {
      auto a = activation_eval(kind, v);
      CHECK(std::isfinite(a.rho));
      CHECK(std::isfinite(a.d1));
      CHECK(std::isfinite(a.d2));
      CHECK(std::isfinite(a.d3));
    }
  }
}

TEST_CASE("activation derivative consistency vs finite differences") {
  const double h = 1e-5;
  for (auto kind : {ActivationKind::Tanh, ActivationKind::Sigmoid}) {
    for (double t = -10.0; t <= 10.0; t += 0.23) {
      auto a = activation_eval(kind, t);
      auto ap = activation_eval(kind, t + h);
      auto am = activation_eval(kind, t - h);
      CHECK(std::fabs((ap.rho - am.rho) / (2 * h) - a.d1) < 1e-6);
      CHECK(std::fabs((ap.d1 - am.d1) / (2 * h) - a.d2) < 1e-6);
      CHECK(std::fabs((ap.d2 - am.d2) / (2 * h) - a.d3) < 1e-6);
    }
  }
}

TEST_CASE("activation bounds hold on a wide grid") {
  for (double t = -50.0; t <= 50.0; t += 0.37) {
    auto a = activation_eval(ActivationKind::Tanh, t);
    CHECK(std::fabs(a.rho) <= 1.0);
    CHECK(std::fabs(a.d1) <= 1.0);
    CHECK(std::fabs(a.d2) <= 1.0);
    CHECK(std::fabs(a.d3) <= 2.0);
    auto s = activation_eval(ActivationKind::Sigmoid, t);
    CHECK(std::fabs(s.rho) <= 1.0);
    CHECK(std::fabs(s.d1) <= 1.0);
    CHECK(std::fabs(s.d2) <= 1.0);
    CHECK(std::fabs(s.d3) <= 1.0);
  }
}

TEST_CASE("init: zero biases, determinism, parameter count, glorot range") {
  auto n1 = init_mlp<double>({2, 3, 1}, ActivationKind::Tanh, 42);
  for (int l = 0; l < n1.depth(); ++l)
    for (int q = 0; q < n1.shape.widths[l + 1]; ++q) CHECK(n1.biases(l)[q] == 0.0);

  auto n2 = init_mlp<double>({2, 3, 1}, ActivationKind::Tanh, 42);
  CHECK(n1.params == n2.params);

  auto n3 = init_mlp<double>({2, 3, 1}, ActivationKind::Tanh, 43);
  CHECK(n1.params != n3.params);

  auto big = init_mlp<double>({2, 30, 30, 30, 30, 1}, ActivationKind::Tanh, 7);
  CHECK(big.param_count() == 2911);

  // glorot bound per layer
  for (int l = 0; l < big.depth(); ++l) {
    const double a =
        std::sqrt(6.0 / (big.shape.widths[l] + big.shape.widths[l + 1]));
    const double* w = big.weights(l);
    const std::size_t cnt =
        static_cast<std::size_t>(big.shape.widths[l]) * big.shape.widths[l + 1];
    for (std::size_t k = 0; k < cnt; ++k) CHECK(std::fabs(w[k]) <= a);
  }
}

TEST_CASE("init rejects bad widths with the offending entry named") {
  CHECK_THROWS_WITH_AS(init_mlp<double>({2}, ActivationKind::Tanh, 1),
                       doctest::Contains("at least"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(init_mlp<double>({2, 0, 1}, ActivationKind::Tanh, 1),
                       doctest::Contains("entry 1"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(init_mlp<double>({2, 3, 2}, ActivationKind::Tanh, 1),
                       doctest::Contains("output width"), std::invalid_argument);
}

TEST_CASE("flatten/unflatten round-trip is the identity") {
  auto net = random_net({3, 7, 5, 1}, ActivationKind::Sigmoid, 11);
  auto flat = net.flatten();
  Mlp<double> other(net.shape);
  other.set_flat(flat);
  CHECK(other.params == net.params);
  CHECK_THROWS_AS(other.set_flat(std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("constant field: zero weights, output bias beta") {
  Mlp<double> net{MlpShape({3, 4, 1}, ActivationKind::Tanh)};
  net.biases(1)[0] = 2.5;
  const std::vector<double> x{0.3, -0.8, 0.1};
  auto fe = eval_field(net, std::span<const double>(x));
  CHECK(fe.value == 2.5);
  for (double g : fe.gradient) CHECK(g == 0.0);
  CHECK(fe.laplacian == 0.0);
}

TEST_CASE("1-D closed form: a*tanh(w x + c)") {
  Mlp<double> net{MlpShape({1, 1, 1}, ActivationKind::Tanh)};
  const double a = 1.7, w = 0.9, c = -0.4;
  net.weights(0)[0] = w;
  net.biases(0)[0] = c;
  net.weights(1)[0] = a;
  for (double xv : {-2.0, -0.5, 0.0, 0.7, 1.9}) {
    const std::vector<double> x{xv};
    auto fe = eval_field(net, std::span<const double>(x));
    auto act = activation_eval(ActivationKind::Tanh, w * xv + c);
    CHECK(fe.value == doctest::Approx(a * act.rho).epsilon(1e-14));
    CHECK(fe.gradient[0] == doctest::Approx(a * w * act.d1).epsilon(1e-14));
    CHECK(fe.laplacian == doctest::Approx(a * w * w * act.d2).epsilon(1e-13));
    // cross-check against central differences
    CHECK(close_mixed(fd_gradient(net, x)[0], fe.gradient[0], 1e-6));
    CHECK(close_mixed(fd_laplacian(net, x), fe.laplacian, 1e-6));
  }
}

TEST_CASE("gradient and laplacian match finite differences on random nets") {
  int idx = 0;
  for (auto kind : {ActivationKind::Tanh, ActivationKind::Sigmoid}) {
    for (const auto& widths :
         {std::vector<int>{2, 30, 30, 30, 30, 1}, std::vector<int>{4, 30, 30, 1},
          std::vector<int>{1, 8, 8, 1}, std::vector<int>{3, 16, 1}}) {
      auto net = random_net(widths, kind, 100 + idx);
      for (int k = 0; k < 3; ++k) {
        auto x = random_point(widths[0], 1000 * idx + k);
        auto fe = eval_field(net, std::span<const double>(x));
        auto gfd = fd_gradient(net, x);
        for (int p = 0; p < widths[0]; ++p) CHECK(close_mixed(gfd[p], fe.gradient[p], 1e-6));
        CHECK(close_mixed(fd_laplacian(net, x), fe.laplacian, 1e-6));
      }
      ++idx;
    }
  }
}

TEST_CASE("param_gradient: zero tanh net puts all mass on the output bias") {
  Mlp<double> net{MlpShape({2, 5, 1}, ActivationKind::Tanh)};
  const std::vector<double> x{0.4, -0.2};
  Cotangent<double> cot;
  cot.w_value = 1.0;
  auto g = param_gradient(net, std::span<const double>(x), cot);
  const std::size_t bias_idx = net.shape.bias_off[1];
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i == bias_idx)
      CHECK(g[i] == 1.0);
    else
      CHECK(g[i] == 0.0);
  }
}

TEST_CASE("param_gradient: output-weight component equals hidden activation") {
  auto net = random_net({2, 6, 4, 1}, ActivationKind::Tanh, 21);
  auto x = random_point(2, 77);
  Cotangent<double> cot;
  cot.w_value = 1.0;
  auto g = param_gradient(net, std::span<const double>(x), cot);

  // hidden activations at the last layer, recomputed by hand
  std::vector<double> h = x;
  for (int l = 0; l < net.depth() - 1; ++l) {
    std::vector<double> nh(net.shape.widths[l + 1]);
    for (int q = 0; q < net.shape.widths[l + 1]; ++q) {
      double z = net.biases(l)[q];
      for (int j = 0; j < net.shape.widths[l]; ++j)
        z += net.weights(l)[q * net.shape.widths[l] + j] * h[j];
      nh[q] = activation_eval(net.shape.activation, z).rho;
    }
    h = nh;
  }
  const std::size_t woff = net.shape.weight_off[net.depth() - 1];
  for (std::size_t j = 0; j < h.size(); ++j)
    CHECK(g[woff + j] == doctest::Approx(h[j]).epsilon(1e-14));
}

TEST_CASE("param_gradient matches finite differences for random cotangents") {
  int idx = 0;
  for (auto kind : {ActivationKind::Tanh, ActivationKind::Sigmoid}) {
    for (const auto& widths : {std::vector<int>{2, 10, 8, 1}, std::vector<int>{3, 6, 6, 6, 1}}) {
      auto net = random_net(widths, kind, 500 + idx);
      auto x = random_point(widths[0], 900 + idx);
      RngStream rs(CounterRng(2000 + idx).split("cot"));
      Cotangent<double> cot;
      cot.w_value = rs.uniform(-1, 1);
      cot.w_laplacian = rs.uniform(-1, 1);
      cot.w_gradient.resize(widths[0]);
      for (auto& v : cot.w_gradient) v = rs.uniform(-1, 1);
      auto an = param_gradient(net, std::span<const double>(x), cot);
      auto fd = fd_param_gradient(net, x, cot);
      CHECK(rel_l2(fd, an) < 1e-5);
      ++idx;
    }
  }
}

TEST_CASE("param_gradient is linear in the cotangent") {
  auto net = random_net({2, 8, 1}, ActivationKind::Sigmoid, 31);
  auto x = random_point(2, 32);
  Cotangent<double> a{1.0, {0.5, -2.0}, 0.25};
  Cotangent<double> b{-0.5, {1.5, 0.75}, 2.0};
  Cotangent<double> ab{a.w_value + b.w_value,
                       {a.w_gradient[0] + b.w_gradient[0], a.w_gradient[1] + b.w_gradient[1]},
                       a.w_laplacian + b.w_laplacian};
  auto ga = param_gradient(net, std::span<const double>(x), a);
  auto gb = param_gradient(net, std::span<const double>(x), b);
  auto gab = param_gradient(net, std::span<const double>(x), ab);
  for (std::size_t i = 0; i < ga.size(); ++i)
    CHECK(gab[i] == doctest::Approx(ga[i] + gb[i]).epsilon(1e-11));
}

TEST_CASE("dimension mismatches raise structured errors") {
  auto net = random_net({3, 4, 1}, ActivationKind::Tanh, 3);
  const std::vector<double> bad{0.1, 0.2};
  CHECK_THROWS_AS((void)eval_field(net, std::span<const double>(bad)), std::invalid_argument);
  Cotangent<double> cot;
  cot.w_value = 1.0;
  cot.w_gradient = {1.0, 2.0};  // wrong length
  const std::vector<double> x{0.1, 0.2, 0.3};
  CHECK_THROWS_AS((void)param_gradient(net, std::span<const double>(x), cot),
                  std::invalid_argument);
}

TEST_CASE("checkpoint round-trips exactly") {
  auto net = random_net({2, 9, 5, 1}, ActivationKind::Sigmoid, 63);
  const std::string path = "ck_test_roundtrip.txt";
  save_checkpoint(path, net);
  auto ck = load_checkpoint(path);
  CHECK(ck.precision_bits == 64);
  CHECK(ck.shape == net.shape);
  auto back = ck.as<double>();
  CHECK(back.params == net.params);

  // float checkpoints round-trip at float precision
  auto fnet = net.cast<float>();
  save_checkpoint(path, fnet);
  auto fck = load_checkpoint(path);
  CHECK(fck.precision_bits == 32);
  auto fback = fck.as<float>();
  CHECK(fback.params == fnet.params);
  std::remove(path.c_str());
}
