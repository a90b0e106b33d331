#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cpinn/geometry.hpp"
#include "cpinn/numerics.hpp"

using namespace cpinn;
using std::numbers::pi;

TEST_CASE("exact measures") {
  auto [a1, b1] = measures(Domain::annulus(1, 3));
  CHECK(a1 == doctest::Approx(8 * pi).epsilon(1e-15));
  CHECK(b1 == doctest::Approx(8 * pi).epsilon(1e-15));
  auto [a2, b2] = measures(Domain::hypercube(4));
  CHECK(a2 == 1.0);
  CHECK(b2 == 8.0);
  auto [a3, b3] = measures(Domain::unit_square_with_subregion());
  CHECK(a3 == 1.0);
  CHECK(b3 == 4.0);
}

TEST_CASE("invalid domains rejected") {
  CHECK_THROWS_AS(Domain::annulus(3, 1), std::invalid_argument);
  CHECK_THROWS_AS(Domain::annulus(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(Domain::hypercube(0), std::invalid_argument);
}

TEST_CASE("empty sample sets keep the support measure") {
  auto s = sample_interior(Domain::annulus(1, 3), 0, 7);
  CHECK(s.n == 0);
  CHECK(s.support_measure == doctest::Approx(8 * pi));
  auto b = sample_boundary(Domain::hypercube(3), 0, 7);
  CHECK(b.n == 0);
  CHECK(b.support_measure == 6.0);
}

TEST_CASE("determinism: identical (domain, n, seed) give identical points") {
  auto a = sample_interior(Domain::annulus(1, 3), 512, 99);
  auto b = sample_interior(Domain::annulus(1, 3), 512, 99);
  CHECK(a.points == b.points);
  auto c = sample_interior(Domain::annulus(1, 3), 512, 100);
  CHECK(a.points != c.points);
  auto d1 = sample_boundary(Domain::hypercube(4), 256, 5);
  auto d2 = sample_boundary(Domain::hypercube(4), 256, 5);
  CHECK(d1.points == d2.points);
}

TEST_CASE("interior and boundary seeds produce different streams") {
  auto a = sample_interior(Domain::hypercube(2), 16, 42);
  auto b = sample_boundary(Domain::hypercube(2), 16, 42);
  CHECK(a.points != b.points);
}

TEST_CASE("support membership for all samples") {
  auto a = sample_interior(Domain::annulus(1, 3), 20000, 3);
  for (std::size_t i = 0; i < a.n; ++i) {
    const double r = std::hypot(a.points[2 * i], a.points[2 * i + 1]);
    CHECK(r >= 1.0 - 1e-12);
    CHECK(r <= 3.0 + 1e-12);
  }
  auto b = sample_boundary(Domain::annulus(1, 3), 20000, 3);
  for (std::size_t i = 0; i < b.n; ++i) {
    const double r = std::hypot(b.points[2 * i], b.points[2 * i + 1]);
    CHECK((std::fabs(r - 1.0) <= 1e-12 || std::fabs(r - 3.0) <= 1e-12));
  }
  auto h = sample_interior(Domain::hypercube(4), 20000, 3);
  for (double v : h.points) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  auto hb = sample_boundary(Domain::hypercube(4), 20000, 3);
  for (std::size_t i = 0; i < hb.n; ++i) {
    int on_facet = 0;
    for (int c = 0; c < 4; ++c) {
      const double v = hb.points[i * 4 + c];
      if (v == 0.0 || v == 1.0) ++on_facet;
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(on_facet >= 1);
  }
}

TEST_CASE("annulus interior: mean of r^2 is 5 within 3 standard errors") {
  const std::size_t n = 100000;
  auto s = sample_interior(Domain::annulus(1, 3), n, 17);
  std::vector<double> r2(n);
  for (std::size_t i = 0; i < n; ++i)
    r2[i] = s.points[2 * i] * s.points[2 * i] + s.points[2 * i + 1] * s.points[2 * i + 1];
  const double mean = pairwise_sum(r2) / n;
  double var = 0;
  for (double v : r2) var += (v - mean) * (v - mean);
  var /= (n - 1);
  const double se = std::sqrt(var / n);
  CHECK(std::fabs(mean - 5.0) <= 3 * se);
}

TEST_CASE("hypercube interior: coordinate means are 1/2 within 3 standard errors") {
  const std::size_t n = 100000;
  auto s = sample_interior(Domain::hypercube(4), n, 21);
  for (int c = 0; c < 4; ++c) {
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) mean += s.points[i * 4 + c];
    mean /= n;
    const double se = std::sqrt(1.0 / 12.0 / n);  // var of U(0,1)
    CHECK(std::fabs(mean - 0.5) <= 3 * se);
  }
}

TEST_CASE("annulus boundary: outer-circle fraction is 3/4 within 3 standard errors") {
  const std::size_t n = 100000;
  auto s = sample_boundary(Domain::annulus(1, 3), n, 29);
  std::size_t outer = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::hypot(s.points[2 * i], s.points[2 * i + 1]) > 2.0) ++outer;
  const double frac = static_cast<double>(outer) / n;
  const double se = std::sqrt(0.75 * 0.25 / n);
  CHECK(std::fabs(frac - 0.75) <= 3 * se);
}

TEST_CASE("hypercube boundary: each facet receives n/2d within 3 standard errors") {
  const std::size_t n = 80000;
  auto s = sample_boundary(Domain::hypercube(4), n, 31);
  int counts[8] = {0};
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 4; ++c) {
      const double v = s.points[i * 4 + c];
      if (v == 0.0) ++counts[2 * c];
      if (v == 1.0) ++counts[2 * c + 1];
    }
  }
  const double p = 1.0 / 8.0;
  const double se = std::sqrt(p * (1 - p) * n);
  for (int f = 0; f < 8; ++f) CHECK(std::fabs(counts[f] - n * p) <= 3 * se);
}

TEST_CASE("monte carlo consistency: (|O|/n) sum g converges at the 3-SE level") {
  // g(x) = x1^2 on the 4-cube: integral 1/3; annulus: handled above.
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
    const std::size_t n = 40000;
    auto s = sample_interior(Domain::hypercube(4), n, seed);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = s.points[i * 4] * s.points[i * 4];
    const double est = s.support_measure / n * pairwise_sum(g);
    double mean = est / s.support_measure;
    double var = 0;
    for (double v : g) var += (v - mean) * (v - mean);
    var /= (n - 1);
    const double se = s.support_measure * std::sqrt(var / n);
    CHECK(std::fabs(est - 1.0 / 3.0) <= 3 * se);
  }
}

TEST_CASE("point dump writes one point per line") {
  auto s = sample_interior(Domain::hypercube(2), 5, 1);
  dump_points(s, "pts_test.txt");
  std::ifstream in("pts_test.txt");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 5);
  std::remove("pts_test.txt");
}
