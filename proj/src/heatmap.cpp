#include "cpinn/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace cpinn {

HeatmapGrid HeatmapGrid::build(const Domain& domain, int n, double cross_section) {
  HeatmapGrid g;
  g.nx = g.ny = n;
  const int d = domain.dim;
  std::vector<double> lo(d), hi(d);
  domain.bounding_box(lo, hi);
  g.x0 = lo[0];
  g.x1 = hi[0];
  g.y0 = lo[1 % d];
  g.y1 = hi[1 % d];
  g.points.resize(static_cast<std::size_t>(n) * n * d);
  g.mask.resize(static_cast<std::size_t>(n) * n);
  std::vector<double> x(d, cross_section);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      x.assign(d, cross_section);
      x[0] = g.x0 + (g.x1 - g.x0) * (i + 0.5) / n;
      if (d > 1) x[1] = g.y0 + (g.y1 - g.y0) * (j + 0.5) / n;
      const std::size_t idx = static_cast<std::size_t>(j) * n + i;
      g.mask[idx] = domain.contains(x) ? 1 : 0;
      std::copy(x.begin(), x.end(), g.points.begin() + idx * d);
    }
  }
  return g;
}

namespace {

// viridis anchors (matplotlib), linearly interpolated
constexpr double kViridis[][3] = {
    {0.267004, 0.004874, 0.329415}, {0.282623, 0.140926, 0.457517},
    {0.253935, 0.265254, 0.529983}, {0.206756, 0.371758, 0.553117},
    {0.163625, 0.471133, 0.558148}, {0.127568, 0.566949, 0.550556},
    {0.134692, 0.658636, 0.517649}, {0.266941, 0.748751, 0.440573},
    {0.477504, 0.821444, 0.318195}, {0.741388, 0.873449, 0.149561},
    {0.993248, 0.906157, 0.143936}};

void colormap(double t, unsigned char* rgb) {
  t = std::clamp(t, 0.0, 1.0);
  const int n = static_cast<int>(sizeof(kViridis) / sizeof(kViridis[0]));
  const double pos = t * (n - 1);
  const int k = std::min(n - 2, static_cast<int>(pos));
  const double f = pos - k;
  for (int c = 0; c < 3; ++c) {
    const double v = kViridis[k][c] * (1.0 - f) + kViridis[k + 1][c] * f;
    rgb[c] = static_cast<unsigned char>(std::lround(255.0 * v));
  }
}

}  // namespace

std::pair<double, double> write_heatmap(const std::string& path, const HeatmapGrid& grid,
                                        std::span<const double> values) {
  if (values.size() != grid.mask.size())
    throw std::invalid_argument("heatmap value array does not match the grid");
  double vmin = 0, vmax = 0;
  bool any = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!grid.mask[i]) continue;
    if (!any) {
      vmin = vmax = values[i];
      any = true;
    } else {
      vmin = std::min(vmin, values[i]);
      vmax = std::max(vmax, values[i]);
    }
  }
  if (!any) vmin = vmax = 0.0;
  const double span = (vmax > vmin) ? vmax - vmin : 1.0;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open heatmap file: " + path);
  out << "P6\n" << grid.nx << " " << grid.ny << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(grid.nx) * 3);
  for (int j = grid.ny - 1; j >= 0; --j) {  // top row = largest x2
    for (int i = 0; i < grid.nx; ++i) {
      const std::size_t idx = static_cast<std::size_t>(j) * grid.nx + i;
      unsigned char* rgb = &row[static_cast<std::size_t>(i) * 3];
      if (!grid.mask[idx]) {
        rgb[0] = rgb[1] = rgb[2] = 230;
      } else {
        colormap((values[idx] - vmin) / span, rgb);
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!out) throw std::runtime_error("failed writing heatmap: " + path);
  return {vmin, vmax};
}

}  // namespace cpinn
