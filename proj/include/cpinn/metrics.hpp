#pragma once

#include <span>
#include <string>

namespace cpinn {

enum class ErrorNorm { L2, Linf };

// Relative L^p error over evaluation samples:
//   L2:   sqrt(sum (a-e)^2 / sum e^2)   (measure factors cancel in the ratio)
//   Linf: max|a-e| / max|e|
// Errors out when the exact field is identically zero on the samples.
double relative_error(std::span<const double> approx, std::span<const double> exact,
                      ErrorNorm norm);

// One row of the comparison table.
struct MetricRow {
  double e2_y = 0.0, einf_y = 0.0;
  double e2_u = 0.0, einf_u = 0.0;
  double J = 0.0;
  double time_s = 0.0;
};

std::string metric_csv_header();
std::string metric_csv_row(const std::string& method, const MetricRow& row);

}  // namespace cpinn
