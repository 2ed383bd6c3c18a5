#pragma once

// Gaussian kernel density estimate with pointwise standard errors.

#include <optional>
#include <span>
#include <vector>

namespace sdestab {

struct KdeOptions {
  /// Fixed bandwidth; the reference rule 1.06 sd n^{-1/5} is used when unset.
  std::optional<double> bandwidth;
  std::size_t min_samples = 1000;
};

class KernelDensity {
 public:
  /// Throws PreconditionError for fewer than `min_samples` samples and
  /// DomainError for a zero-variance sample without a fixed bandwidth.
  explicit KernelDensity(std::span<const double> samples, const KdeOptions& options = {});

  double operator()(double y) const noexcept;
  /// Empirical standard error sqrt(Var K_h(y - X) / n).
  double std_error(double y) const noexcept;
  /// Number of samples in [y - r, y + r].
  std::size_t count_within(double y, double r) const noexcept;

  double bandwidth() const noexcept { return h_; }
  std::size_t size() const noexcept { return sorted_.size(); }
  double min() const noexcept { return sorted_.front(); }
  double max() const noexcept { return sorted_.back(); }

 private:
  struct Moments {
    double mean = 0.0;
    double mean_sq = 0.0;
  };
  Moments kernel_moments(double y) const noexcept;

  std::vector<double> sorted_;
  double h_ = 0.0;
};

/// Reference-rule bandwidth 1.06 sd n^{-1/5}.
double reference_bandwidth(std::span<const double> samples);

/// Evaluates the estimate on an evenly spaced grid of `points` points over [lo, hi].
std::vector<double> kde_density(const KernelDensity& kde, double lo, double hi, std::size_t points);

}  // namespace sdestab
