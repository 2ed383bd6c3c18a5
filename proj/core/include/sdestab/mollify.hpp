#pragma once

// Mollifier rho(x) = mu exp(-1/(1 - x^2)) on (-1, 1), rho_n(x) = n rho(nx), and
// the smoothed coefficients c_n = c * rho_n.

#include "sdestab/chebyshev.hpp"
#include "sdestab/coeffs.hpp"
#include "sdestab/quadrature.hpp"
#include "sdestab/weighted_norm.hpp"

namespace sdestab {

/// The bump kernel. Built once per process; `instance()` is thread-safe.
class BumpKernel {
 public:
  static const BumpKernel& instance();

  /// mu with 1/mu = int_{-1}^{1} exp(-1/(1-x^2)) dx.
  double mu() const noexcept { return mu_; }
  /// rho(x); zero for |x| >= 1.
  double operator()(double x) const noexcept;
  /// F(u) = int_{-1}^{u} rho. F(0) = 1/2 exactly, F(-u) = 1 - F(u).
  double cdf(double u) const noexcept;

 private:
  BumpKernel();

  double mu_ = 0.0;
  PiecewiseChebyshev left_cdf_;  // F on [-1, 0]
};

/// rho(x) = mu e^{-1/(1-x^2)} for |x| < 1, else 0.
double bump(double x) noexcept;

/// rho_n(x) = n rho(n x).
double scaled_bump(double n, double x) noexcept;

struct MollifyOptions {
  /// Relative tolerance of the convolution quadrature.
  QuadratureSpec quad{1e-12, 20};
  /// Memoize evaluations of general (non step-function) bases on interpolation
  /// buckets of width 1/(4n). Exact quadrature is used when false.
  bool memoize = true;
};

/// c_n(x) = int c(x - y) rho_n(y) dy.
///
/// Step-function bases are evaluated in closed form through the kernel CDF,
/// c_n(x) = v_0 + sum_i J_i F(n(x - c_i)). Other bases use quadrature over
/// the window [x - 1/n, x + 1/n], split at the base's breakpoints.
/// Metadata (bound, one-sided constant, Hoelder pair, lambda) carries over.
Coefficient mollify(const Coefficient& c, int n, const MollifyOptions& options = {});

/// A-priori bound on int |c - c_n|^{2p} weight: 4 K^{2p} sqrt(pi lambda T) / n^{2p eta}.
double mollification_distance_bound(const Coefficient& c, int n, double p, const WeightedMeasure& measure);

}  // namespace sdestab
