#include "cpinn/geometry.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "cpinn/rng.hpp"

namespace cpinn {

Domain Domain::annulus(double ri, double ro) {
  if (!(0.0 < ri && ri < ro))
    throw std::invalid_argument("annulus needs 0 < r_inner < r_outer, got r_inner=" +
                                std::to_string(ri) + " r_outer=" + std::to_string(ro));
  Domain d;
  d.shape = DomainShape::Annulus;
  d.dim = 2;
  d.r_inner = ri;
  d.r_outer = ro;
  return d;
}

Domain Domain::hypercube(int dd) {
  if (dd < 1) throw std::invalid_argument("hypercube dimension must be >= 1");
  Domain d;
  d.shape = DomainShape::Hypercube;
  d.dim = dd;
  return d;
}

Domain Domain::unit_square_with_subregion() {
  Domain d;
  d.shape = DomainShape::UnitSquareWithSubregion;
  d.dim = 2;
  return d;
}

void Domain::bounding_box(std::span<double> lo, std::span<double> hi) const {
  if (shape == DomainShape::Annulus) {
    lo[0] = lo[1] = -r_outer;
    hi[0] = hi[1] = r_outer;
  } else {
    for (int c = 0; c < dim; ++c) {
      lo[c] = 0.0;
      hi[c] = 1.0;
    }
  }
}

bool Domain::contains(std::span<const double> x, double tol) const {
  if (shape == DomainShape::Annulus) {
    const double r = std::hypot(x[0], x[1]);
    return r >= r_inner - tol && r <= r_outer + tol;
  }
  for (int c = 0; c < dim; ++c)
    if (x[c] < -tol || x[c] > 1.0 + tol) return false;
  return true;
}

std::string Domain::describe() const {
  switch (shape) {
    case DomainShape::Annulus:
      return "annulus(" + std::to_string(r_inner) + ", " + std::to_string(r_outer) + ")";
    case DomainShape::Hypercube:
      return "hypercube(" + std::to_string(dim) + ")";
    default:
      return "unit_square_with_subregion";
  }
}

std::pair<double, double> measures(const Domain& domain) {
  using std::numbers::pi;
  if (domain.shape == DomainShape::Annulus) {
    const double area = pi * (domain.r_outer * domain.r_outer - domain.r_inner * domain.r_inner);
    const double perim = 2.0 * pi * (domain.r_inner + domain.r_outer);
    return {area, perim};
  }
  return {1.0, 2.0 * domain.dim};
}

SampleSet sample_interior(const Domain& domain, std::size_t n, std::uint64_t seed) {
  using std::numbers::pi;
  SampleSet out;
  out.dim = domain.dim;
  out.n = n;
  out.kind = SampleSet::Kind::Interior;
  out.seed = seed;
  out.support_measure = measures(domain).first;
  out.points.resize(n * domain.dim);
  const CounterRng rng = CounterRng(seed).split("interior");
  const std::size_t stride = domain.dim + 2;
  if (domain.shape == DomainShape::Annulus) {
    const double ri2 = domain.r_inner * domain.r_inner;
    const double ro2 = domain.r_outer * domain.r_outer;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform01(i * stride);
      const double r = std::sqrt(ri2 + u * (ro2 - ri2));  // radius CDF inversion
      const double th = 2.0 * pi * rng.uniform01(i * stride + 1);
      out.points[i * 2] = r * std::cos(th);
      out.points[i * 2 + 1] = r * std::sin(th);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (int c = 0; c < domain.dim; ++c)
        out.points[i * domain.dim + c] = rng.uniform01(i * stride + c);
  }
  return out;
}

SampleSet sample_boundary(const Domain& domain, std::size_t n, std::uint64_t seed) {
  using std::numbers::pi;
  SampleSet out;
  out.dim = domain.dim;
  out.n = n;
  out.kind = SampleSet::Kind::Boundary;
  out.seed = seed;
  out.support_measure = measures(domain).second;
  out.points.resize(n * domain.dim);
  const CounterRng rng = CounterRng(seed).split("boundary");
  const std::size_t stride = domain.dim + 2;
  if (domain.shape == DomainShape::Annulus) {
    // circle choice proportional to circumference
    const double p_inner = domain.r_inner / (domain.r_inner + domain.r_outer);
    for (std::size_t i = 0; i < n; ++i) {
      const double pick = rng.uniform01(i * stride);
      const double r = pick < p_inner ? domain.r_inner : domain.r_outer;
      const double th = 2.0 * pi * rng.uniform01(i * stride + 1);
      out.points[i * 2] = r * std::cos(th);
      out.points[i * 2 + 1] = r * std::sin(th);
    }
  } else {
    const int d = domain.dim;
    for (std::size_t i = 0; i < n; ++i) {
      // facets have equal measure: pick one of the 2d uniformly
      const int facet = static_cast<int>(rng.uniform01(i * stride) * 2 * d) % (2 * d);
      const int c_fix = facet / 2;
      const double side = (facet % 2 == 0) ? 0.0 : 1.0;
      for (int c = 0; c < d; ++c)
        out.points[i * d + c] =
            (c == c_fix) ? side : rng.uniform01(i * stride + 1 + c);
    }
  }
  return out;
}

void dump_points(const SampleSet& set, const std::string& path) {
  std::ofstream outf(path);
  if (!outf) throw std::runtime_error("cannot open point dump file: " + path);
  outf.precision(17);
  for (std::size_t i = 0; i < set.n; ++i) {
    for (int c = 0; c < set.dim; ++c) {
      if (c) outf << ' ';
      outf << set.points[i * set.dim + c];
    }
    outf << '\n';
  }
}

}  // namespace cpinn
