#pragma once

#include <span>

namespace sdestab {

/// Sample mean with standard error and a batch-means confidence interval.
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n)
  double ci_low = 0.0;     // batch-means 95% interval
  double ci_high = 0.0;
  std::size_t count = 0;

  bool ci_excludes_zero() const noexcept { return ci_low > 0.0 || ci_high < 0.0; }
};

/// Fixed-order summation (index order), so the result is independent of how
/// the samples were produced.
Estimate estimate_mean(std::span<const double> samples, std::size_t batches = 20);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_std_error = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Needs at least 3 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Pearson correlation coefficient.
double correlation(std::span<const double> x, std::span<const double> y);

}  // namespace sdestab
