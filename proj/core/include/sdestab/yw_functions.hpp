#pragma once

// Yamada-Watanabe penalty functions.
//
//   psi(z)  = mu exp(-1/((kappa - z)(z - kappa/delta)))  on (kappa/delta, kappa)
//   phi'(x) = sign(x) int_0^{|x|} psi
//   phi(x)  = int_0^{|x|} int_0^y psi(z) dz dy

#include <cstdint>

#include "sdestab/chebyshev.hpp"

namespace sdestab {

class YwParams {
 public:
  /// delta > 1, 0 < kappa < 1. Builds the normalization and the interpolation tables.
  YwParams(double delta, double kappa);

  double delta() const noexcept { return delta_; }
  double kappa() const noexcept { return kappa_; }
  double support_lo() const noexcept { return kappa_ / delta_; }
  double support_hi() const noexcept { return kappa_; }

  /// log mu. mu itself overflows a double once kappa (1 - 1/delta) drops below ~0.09.
  double log_mu() const noexcept { return log_mu_; }
  /// mu, or +inf when it does not fit in a double.
  double mu() const noexcept;

  /// Quadrature estimate of int psi after normalization (should be 1).
  double mass() const noexcept { return mass_; }

  double psi(double z) const noexcept;
  /// int_{kappa/delta}^{z} psi, in [0, 1].
  double psi_cdf(double z) const noexcept;
  /// int_{kappa/delta}^{z} s psi(s) ds.
  double psi_first_moment(double z) const noexcept;

 private:
  double delta_;
  double kappa_;
  double half_width_;
  double mid_;
  double log_mu_ = 0.0;
  double inv_mass_ = 0.0;  // 1 / int exp(-(g - g_min))
  double mass_ = 0.0;
  PiecewiseChebyshev cdf_;
  PiecewiseChebyshev moment_;
};

double psi(double z, const YwParams& p) noexcept;
double phi_prime(double x, const YwParams& p) noexcept;
double phi(double x, const YwParams& p) noexcept;
/// psi(|x|). Throws DomainError at x = 0.
double phi_double_prime(double x, const YwParams& p);
/// c = int z psi(z) dz, so phi(x) = |x| - c for |x| >= kappa.
double c_delta_kappa(const YwParams& p) noexcept;

struct YwPropertyReport {
  double delta = 0.0;
  double kappa = 0.0;
  double mass_error = 0.0;        // |int psi - 1|
  double prop2_max_zero = 0.0;    // max |phi'(x)| on 0 < |x| <= kappa/delta
  double prop2_min_ratio = 0.0;   // min phi'(x)/x over the grid, |x| > kappa/delta
  // Just above kappa/delta, phi' is below the smallest double, so strict
  // positivity is only observable from the support midpoint on.
  double prop2_min_ratio_bulk = 0.0;
  double prop3_excess = 0.0;      // max (|phi'(x)| - 1)
  double prop4_excess = 0.0;      // max (|x| - kappa - phi(x))
  double prop5_excess = 0.0;      // max (psi(|x|) - 2/(|x| log delta)) on the support
  double prop5_max_ratio = 0.0;   // max psi(|x|) |x| log(delta) / 2 on the support
  double prop5_worst_x = 0.0;

  bool prop2_ok(double tol) const noexcept {
    return prop2_max_zero <= tol && prop2_min_ratio >= 0.0 && prop2_min_ratio_bulk > 0.0;
  }
  bool prop3_ok(double tol) const noexcept { return prop3_excess <= tol; }
  bool prop4_ok(double tol) const noexcept { return prop4_excess <= tol; }
  bool prop5_ok(double tol) const noexcept { return prop5_excess <= tol; }
  bool mass_ok(double tol) const noexcept { return mass_error <= tol; }
};

/// Evaluates the properties on `grid_points` evenly spaced points of [-3 kappa, 3 kappa]
/// (x = 0 skipped).
YwPropertyReport check_yw_properties(const YwParams& p, std::size_t grid_points = 10000);

}  // namespace sdestab
