#pragma once

// Gaussian-weighted L^p norms and the coefficient distance epsilon_p.
//
//   ||f||_p = ( int |f(x)|^p exp(-|x - x0|^2 / (2 (8 lambda) T)) dx )^{1/p}
//   epsilon_p = ||b - b^||_p^p  v  ||sigma - sigma^||_{2p}^{2p}

#include <functional>
#include <span>

#include "sdestab/coeffs.hpp"
#include "sdestab/quadrature.hpp"

namespace sdestab {

struct WeightedMeasure {
  double x0 = 0.0;
  double lambda = 1.0;
  double horizon = 1.0;  // T

  WeightedMeasure() = default;
  WeightedMeasure(double x0_, double lambda_, double horizon_);

  /// Variance of the Gaussian weight, 8 lambda T.
  double variance() const noexcept { return 8.0 * lambda * horizon; }
  double weight(double x) const noexcept;
  /// Total mass: int weight = sqrt(2 pi 8 lambda T) = 4 sqrt(pi lambda T).
  double total_mass() const noexcept;

  static WeightedMeasure for_pair(const SdePair& pair);
};

struct NormSpec {
  QuadratureSpec quad{1e-12, 20};
  /// Integration window |x - x0| <= truncation_radius * sqrt(8 lambda T).
  double truncation_radius = 10.0;
};

/// Upper bound on the discarded tail mass: sup|f|^p * sqrt(2 pi v) * erfc(R / sqrt 2), v = 8 lambda T.
double truncation_tail_bound(double sup_abs_f_pow_p, const WeightedMeasure& m, double radius);

/// ||f||_p. `breakpoints` are discontinuities of f; the quadrature splits there.
double weighted_lp_norm(const std::function<double(double)>& f, double p, const WeightedMeasure& m,
                        const NormSpec& spec = {}, std::span<const double> breakpoints = {});

/// ||f||_p^p, which is what epsilon_p actually uses (avoids a root and re-power).
double weighted_lp_integral(const std::function<double(double)>& f, double p, const WeightedMeasure& m,
                            const NormSpec& spec = {}, std::span<const double> breakpoints = {});

struct EpsilonReport {
  double p = 1.0;
  double drift_term = 0.0;      // ||b - b^||_p^p
  double diffusion_term = 0.0;  // ||sigma - sigma^||_{2p}^{2p}
  double epsilon = 0.0;         // max of the two
  bool below_one = false;       // epsilon < 1
  bool log_condition = true;    // 1/log(1/epsilon) < 1, only binding when alpha = 0
  bool alpha_zero = false;

  bool meets_assumption() const noexcept { return below_one && (!alpha_zero || log_condition); }
};

/// Norm of the coefficient gaps b - b^ and sigma - sigma^ under `m`.
EpsilonReport epsilon_p(const SdePair& pair, double p, const WeightedMeasure& m, const NormSpec& spec = {});

/// Same, with the measure taken from the pair (x0, max lambda, T).
EpsilonReport epsilon_p(const SdePair& pair, double p, const NormSpec& spec = {});

}  // namespace sdestab
