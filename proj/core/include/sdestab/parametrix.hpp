#pragma once

// Parametrix pieces for the transition density of dX = b(X)dt + sigma(X)dW:
// the frozen Gaussian kernel, the kernel theta^, the constant C0 with its
// pointwise bound, the first correction terms of the expansion, and the
// Gaussian upper bound p_t(x0, y) <= C p_{8 lambda}(t, x0, y).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdestab/coeffs.hpp"

namespace sdestab {

struct FrozenKernelParams {
  double t0 = 1.0;
  double K = 1.0;
  double lambda = 1.0;
  double eta = 1.0;

  /// Throws DomainError unless t0 > 0, K >= 0, lambda >= 1, eta in [1/2, 1].
  void validate() const;

  /// K = max(drift bound, diffusion Hoelder constant); lambda, eta from the diffusion.
  static FrozenKernelParams from_coefficients(const CoefficientPair& coeffs, double t0);
};

/// p_c(t, x, z) = exp(-|x - z|^2 / (2ct)) / sqrt(2 pi c t).
double gaussian_kernel(double c, double t, double x, double z);

/// p_t^z(x, y): Gaussian density in y with mean x + b(z)t and variance a(z)t, a = sigma^2.
double frozen_kernel(const CoefficientPair& coeffs, double t, double x, double y, double z);

/// theta^_t(x, z) = (a(x) - a(z))/2 { (z - x - b(z)t)^2 / (t a(z))^2 - 1/(t a(z)) }
///                + (b(x) - b(z)) (z - x - b(z)t) / (t a(z)).
/// This is (L - L^z) applied in x to p_t^z(x, z), L the generator; the drift
/// difference enters with a plus sign.
double theta_hat(const CoefficientPair& coeffs, double t, double x, double z);

/// (|w| / sqrt(t a)) exp(-w^2 / (4 a t)), w = z - x - b t. Bounded by sqrt(2/e).
double drift_moment_factor(double t, double x, double z, double b, double a);

/// |x - z|^eta / t^{eta/2} exp(-|x - z|^2 / (16 lambda t)). Bounded by (8 lambda eta / e)^{eta/2}.
double holder_moment_factor(double t, double x, double z, double eta, double lambda);

/// C0 = 8 K lambda^{3/2} e^{t0 K^2/(4 lambda) - 1/2} t0^{(1-eta)/2}
///    + 2^{(3 eta + 1)/2} (4 + e) K lambda^{2 + eta/2} e^{t0 K^2/(4 lambda) - 1 - eta/2}.
double c0_constant(const FrozenKernelParams& params);

struct ThetaBoundReport {
  double c0 = 0.0;          // constant actually used (after scaling)
  double max_ratio = 0.0;   // max |theta^| p^z / (C0 t^{eta/2 - 1} p_{8 lambda})
  double worst_t = 0.0;
  double worst_x = 0.0;
  double worst_z = 0.0;
  std::size_t samples = 0;
  std::size_t violations = 0;  // samples with ratio > 1 + 1e-9

  bool pass() const noexcept { return max_ratio <= 1.0 + 1e-9; }
};

/// Samples (t, x, z) with t in (0, t0] and |x - z| up to 10 sqrt(8 lambda t0), half of
/// them concentrated where the bound is tight (x near a breakpoint, |x - z| ~ sqrt t).
/// `c0_scale` multiplies C0; values below 1 give a negative control.
ThetaBoundReport check_theta_bound(const CoefficientPair& coeffs, const FrozenKernelParams& params,
                                   std::size_t n_samples, std::uint64_t seed, double c0_scale = 1.0);

/// Both ratio evaluations for one point, shared with the sampler above.
double theta_bound_ratio(const CoefficientPair& coeffs, const FrozenKernelParams& params, double c0, double t,
                         double x, double z);

/// Constant bounding the frozen kernel by the reference Gaussian:
/// p_t^z(x, y) <= sqrt(8) lambda e^{lambda K^2 t0 / 2} p_{8 lambda}(t, x, y).
double frozen_kernel_factor(const FrozenKernelParams& params);

/// m-th majorant coefficient:
///   frozen_kernel_factor * (C0 Gamma(eta/2) t^{eta/2})^m / Gamma(1 + m eta/2).
/// |I^m_t(y, x0)| <= series_majorant(m) * p_{8 lambda}(t, x0, y).
double series_majorant(int m, double t, const FrozenKernelParams& params);

/// sum_{m > order} series_majorant(m), summed until terms stop contributing.
double series_majorant_tail(int order, double t, const FrozenKernelParams& params);

struct IntegratorSpec {
  std::uint64_t seed = 7;
  std::size_t min_samples = 1 << 16;
  std::size_t max_samples = 1 << 21;
  /// Stop once the standard error is below max(abs, rel * |estimate|).
  double target_abs_error = 1e-4;
  double target_rel_error = 1e-2;
  unsigned workers = 1;
};

struct McValue {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
  bool low_precision = false;  // budget exhausted before the target error
};

/// Monte Carlo estimate of the m-th correction I^m_t(y, x0). Times are drawn from
/// Dirichlet(eta/2, ..., eta/2, 1) on the simplex, spatial points from a Brownian
/// bridge x0 -> y. Invariant to the worker count.
McValue parametrix_term(const CoefficientPair& coeffs, const FrozenKernelParams& params, int m, double t, double y,
                        double x0, const IntegratorSpec& spec = {});

struct DensityEstimate {
  double frozen = 0.0;               // p_t^y(x0, y)
  std::vector<McValue> corrections;  // m = 1..order
  double tail_bound = 0.0;           // sum_{m > order} majorant(m) p_{8 lambda}(t, x0, y)
  double total = 0.0;
  bool low_precision = false;
};

DensityEstimate density_estimate(const CoefficientPair& coeffs, const FrozenKernelParams& params, double t, double y,
                                 double x0, int order = 2, const IntegratorSpec& spec = {});

struct GaussianBoundOptions {
  std::size_t grid_points = 401;
  /// A grid point counts as supported when at least this many samples lie within +-2h.
  std::size_t min_support = 400;
};

struct GaussianBoundCertificate {
  double c_hat = 0.0;           // max over the supported grid of kde / p_{8 lambda}
  double c_hat_std_error = 0.0; // KDE standard error at the maximizer, divided by p_{8 lambda}
  double argmax = 0.0;
  double region_lo = 0.0;
  double region_hi = 0.0;
  double bandwidth = 0.0;
  bool edge_dominated = false;  // maximum on the boundary of the supported region
  bool finite = false;
  std::vector<std::string> warnings;
};

/// C^ from terminal samples of X_t started at x0.
GaussianBoundCertificate certify_gaussian_bound(double t, double x0, double lambda, std::span<const double> samples,
                                                const GaussianBoundOptions& options = {});

}  // namespace sdestab
