#include "sdestab/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdestab/errors.hpp"

namespace sdestab {

namespace {

constexpr double kCutoff = 8.0;  // kernel treated as zero beyond 8 bandwidths

double sample_sd(std::span<const double> xs) {
  double mean = 0.0;
  for (double v : xs) mean += v;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

double reference_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw DomainError("reference_bandwidth: need at least 2 samples");
  return 1.06 * sample_sd(samples) * std::pow(static_cast<double>(samples.size()), -0.2);
}

KernelDensity::KernelDensity(std::span<const double> samples, const KdeOptions& options)
    : sorted_(samples.begin(), samples.end()) {
  if (sorted_.size() < std::max<std::size_t>(options.min_samples, 2))
    throw PreconditionError("kde: too few samples");
  for (double v : sorted_)
    if (!std::isfinite(v)) throw DomainError("kde: non-finite sample");
  std::sort(sorted_.begin(), sorted_.end());
  if (options.bandwidth) {
    if (!(*options.bandwidth > 0.0)) throw DomainError("kde: bandwidth must be > 0");
    h_ = *options.bandwidth;
  } else {
    if (sorted_.front() == sorted_.back()) throw DomainError("kde: degenerate sample (zero variance)");
    h_ = reference_bandwidth(sorted_);
  }
}

KernelDensity::Moments KernelDensity::kernel_moments(double y) const noexcept {
  const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), y - kCutoff * h_);
  const auto hi = std::upper_bound(lo, sorted_.end(), y + kCutoff * h_);
  const double norm = 1.0 / (h_ * std::sqrt(2.0 * std::numbers::pi));
  double s = 0.0;
  double s2 = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double u = (y - *it) / h_;
    const double k = norm * std::exp(-0.5 * u * u);
    s += k;
    s2 += k * k;
  }
  const double n = static_cast<double>(sorted_.size());
  return {s / n, s2 / n};
}

double KernelDensity::operator()(double y) const noexcept { return kernel_moments(y).mean; }

double KernelDensity::std_error(double y) const noexcept {
  const auto m = kernel_moments(y);
  const double var = std::max(m.mean_sq - m.mean * m.mean, 0.0);
  return std::sqrt(var / static_cast<double>(sorted_.size()));
}

std::size_t KernelDensity::count_within(double y, double r) const noexcept {
  const auto lo = std::lower_bound(sorted_.begin(), sorted_.end(), y - r);
  const auto hi = std::upper_bound(lo, sorted_.end(), y + r);
  return static_cast<std::size_t>(hi - lo);
}

std::vector<double> kde_density(const KernelDensity& kde, double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw DomainError("kde_density: need at least 2 points on a nonempty interval");
  std::vector<double> out(points);
  for (std::size_t i = 0; i < points; ++i)
    out[i] = kde(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
  return out;
}

}  // namespace sdestab
