#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace acquaint {

// Type-7 (linear interpolation) sample quantile; `values` need not be sorted.
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;          // clamped to [0,1]
  bool degenerate = false;  // total sum of squares is zero
  std::vector<double> residuals;
};
// Ordinary least squares y = slope * x + intercept.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

}  // namespace acquaint
