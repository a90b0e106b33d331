#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cpinn {

enum class DomainShape { Annulus, Hypercube, UnitSquareWithSubregion };

// Sampling domains. The annulus is r_inner <= r <= r_outer in the plane;
// hypercubes are (0,1)^d; the unit square variant carries the marked
// subregion [0.25, 0.75]^2 used by piecewise coefficients.
struct Domain {
  DomainShape shape = DomainShape::Hypercube;
  int dim = 1;
  double r_inner = 0.0, r_outer = 0.0;

  static Domain annulus(double ri, double ro);
  static Domain hypercube(int d);
  static Domain unit_square_with_subregion();

  // axis-aligned bounding box, for plotting grids
  void bounding_box(std::span<double> lo, std::span<double> hi) const;
  bool contains(std::span<const double> x, double tol = 1e-12) const;
  std::string describe() const;
};

// (|Omega|, |dOmega|), exact.
std::pair<double, double> measures(const Domain& domain);

struct SampleSet {
  enum class Kind { Interior, Boundary };
  std::vector<double> points;  // point-major, n * dim
  int dim = 0;
  std::size_t n = 0;
  double support_measure = 0.0;  // |Omega| or |dOmega|
  Kind kind = Kind::Interior;
  std::uint64_t seed = 0;

  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

// i.i.d. uniform samples; deterministic in (domain, n, seed) and independent
// of evaluation order (each point gets its own counter range).
SampleSet sample_interior(const Domain& domain, std::size_t n, std::uint64_t seed);
SampleSet sample_boundary(const Domain& domain, std::size_t n, std::uint64_t seed);

// Plain-text dump, one point per line, whitespace-separated coordinates.
void dump_points(const SampleSet& set, const std::string& path);

}  // namespace cpinn
