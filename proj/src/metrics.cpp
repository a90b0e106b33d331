#include "cpinn/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cpinn/numerics.hpp"

namespace cpinn {

double relative_error(std::span<const double> approx, std::span<const double> exact,
                      ErrorNorm norm) {
  if (approx.size() != exact.size() || approx.empty())
    throw std::invalid_argument("relative_error needs matching nonempty sample arrays");
  if (norm == ErrorNorm::Linf) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < approx.size(); ++i) {
      num = std::max(num, std::fabs(approx[i] - exact[i]));
      den = std::max(den, std::fabs(exact[i]));
    }
    if (den == 0.0) throw std::invalid_argument("relative_error: exact field vanishes on samples");
    return num / den;
  }
  std::vector<double> dn(approx.size()), de(approx.size());
  for (std::size_t i = 0; i < approx.size(); ++i) {
    dn[i] = (approx[i] - exact[i]) * (approx[i] - exact[i]);
    de[i] = exact[i] * exact[i];
  }
  const double den = pairwise_sum(de);
  if (den == 0.0) throw std::invalid_argument("relative_error: exact field vanishes on samples");
  return std::sqrt(pairwise_sum(dn) / den);
}

std::string metric_csv_header() { return "method,e2_y,einf_y,e2_u,einf_u,J,time_s"; }

std::string metric_csv_row(const std::string& method, const MetricRow& row) {
  std::ostringstream os;
  os.precision(12);
  os << method << ',' << row.e2_y << ',' << row.einf_y << ',' << row.e2_u << ',' << row.einf_u
     << ',' << row.J << ',' << row.time_s;
  return os.str();
}

}  // namespace cpinn
