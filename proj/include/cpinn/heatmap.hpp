#pragma once

#include <span>
#include <string>
#include <vector>

#include "cpinn/geometry.hpp"

namespace cpinn {

// Raster grid over the domain's bounding box in the (x1, x2) plane; for
// d > 2 the remaining coordinates sit at the cross-section value (0.5).
struct HeatmapGrid {
  int nx = 200, ny = 200;
  std::vector<double> points;       // grid points as full d-vectors, row-major
  std::vector<unsigned char> mask;  // 1 = inside the domain
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  static HeatmapGrid build(const Domain& domain, int n, double cross_section = 0.5);
};

// Binary PPM (P6) with the fixed viridis-like colormap; masked-out pixels
// render light gray. Returns the (vmin, vmax) range used.
std::pair<double, double> write_heatmap(const std::string& path, const HeatmapGrid& grid,
                                        std::span<const double> values);

}  // namespace cpinn
