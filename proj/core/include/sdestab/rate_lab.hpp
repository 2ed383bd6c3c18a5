#pragma once

// Stability experiments: mollify the coefficients along a ladder n, measure
// epsilon_{p,n} and the coupled path error, and compare the fitted log-log
// slope with the rate exponent of the corresponding bound.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sdestab/mollify.hpp"
#include "sdestab/sde_sim.hpp"
#include "sdestab/stats.hpp"
#include "sdestab/weighted_norm.hpp"

namespace sdestab {

enum class Theorem {
  StoppedL1,  // sup_tau E|X_tau - X^_tau|
  SupL1,      // E sup_t |X_t - X^_t|
  LpMoment,   // E sup_t |X_t - X^_t|^p, p >= 2
  LpJensen,   // E sup_t |X_t - X^_t|^p, p in (1, 2)
  Bv,         // E|g(X_T) - g(X^_T)|^r
};

std::string to_string(Theorem t);
/// Accepts "stopped", "sup", "p-moment", "p-jensen", "bv". Throws ConfigError otherwise.
Theorem theorem_from_string(const std::string& s);

enum class RateMode { Power, Logarithmic };

struct ExponentInfo {
  RateMode mode = RateMode::Power;
  /// Power mode: error ~ eps^exponent. Logarithmic mode: error ~ log(1/eps)^{-log_power}
  /// and the fit is against that transformed x, so exponent is 1.
  double exponent = 0.0;
  double log_power = 0.0;
  /// The x-axis is eps_q with q = epsilon_order.
  double epsilon_order = 1.0;
  std::string formula;
};

/// Exponent of the bound for `theorem` at Hoelder index alpha = eta - 1/2.
/// Throws DomainError for alpha outside [0, 1/2], or p outside the theorem's range.
ExponentInfo theoretical_exponent(double alpha, Theorem theorem, double p = 1.0);

/// OLS of log y on log x. Throws PreconditionError for fewer than 3 points and
/// DomainError for non-positive values.
LineFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// The x-axis value for eps under `info`: eps itself, or log(1/eps)^{-log_power}.
double rate_axis(double eps, const ExponentInfo& info);

struct RateExperimentConfig {
  /// x0, T and the exact coefficients; `perturbed` is ignored and rebuilt per n.
  SdePair base{0.0, 1.0, {builtin::constant(0.0), builtin::constant(1.0)},
               {builtin::constant(0.0), builtin::constant(1.0)}};
  std::vector<int> n_ladder{2, 4, 8, 16, 32};
  double p = 1.0;
  Theorem theorem = Theorem::SupL1;
  SimulationPlan plan;
  /// Finite family standing in for all stopping times; empty means {T/4, T/2, T} and exits at 0.5, 1.
  std::vector<StoppingRule> stopping_family;
  BvFunction bv = BvFunction::indicator(0.0);
  double r = 1.0;
  double slope_tolerance = 0.15;
  MollifyOptions mollify;
  NormSpec norm;
  bool grid_doubling = true;

  /// Throws PreconditionError if the ladder is not strictly increasing with at least 3 entries.
  void validate() const;
};

/// (mollify(b, n), mollify(sigma, n)); constant coefficients are kept as they are.
CoefficientPair mollified_pair(const CoefficientPair& base, int n, const MollifyOptions& options = {});

struct RatePoint {
  int n = 0;
  std::uint64_t seed = 0;
  EpsilonReport eps;
  double epsilon = 0.0;  // the x-axis eps_q
  Estimate error;
  double axis = 0.0;     // rate_axis(epsilon)
  std::string rule;      // stopping rule attaining the max, for StoppedL1
  bool used = false;
  std::string note;      // why a point was excluded
};

enum class Verdict { Consistent, Inconsistent, Inconclusive };
std::string to_string(Verdict v);

struct RateFit {
  Theorem theorem = Theorem::SupL1;
  double alpha = 0.0;
  ExponentInfo exponent;
  std::vector<RatePoint> points;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_std_error = 0.0;
  /// Pearson correlation of error against the axis value over the used points.
  double correlation = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<GridDoubling> doubling;  // at the largest n
  std::vector<std::string> warnings;
};

RateFit run_stability_experiment(const RateExperimentConfig& cfg);

struct KeyEstimateReport {
  Estimate drift_integral;      // int_0^T E|b - b^|(X^_s) ds
  double drift_norm = 0.0;      // ||b - b^||_1
  double drift_ratio = 0.0;
  Estimate diffusion_integral;  // int_0^T E|sigma - sigma^|^2(X^_s) ds
  double diffusion_norm = 0.0;  // ||sigma - sigma^||_2^2
  double diffusion_ratio = 0.0;
  /// A zero norm with a nonzero integral.
  bool flagged = false;
};

KeyEstimateReport key_estimate_check(const SdePair& pair, const SimulationPlan& plan, const NormSpec& norm = {});

struct KeyLadderReport {
  std::vector<int> n;
  std::vector<KeyEstimateReport> entries;
  /// max ratio / min ratio over entries with a nonzero norm; NaN with fewer than two.
  double drift_band = 0.0;
  double diffusion_band = 0.0;

  bool drift_ok(double limit = 10.0) const noexcept { return drift_band <= limit; }
  bool diffusion_ok(double limit = 10.0) const noexcept { return diffusion_band <= limit; }
};

KeyLadderReport key_estimate_ladder(const SdePair& base, const std::vector<int>& ladder, const SimulationPlan& plan,
                                    const MollifyOptions& mollify = {}, const NormSpec& norm = {});

struct AvikainenReport {
  double lhs = 0.0;           // E|g(X_T) - g(X^_T)|^r
  double lhs_std_error = 0.0;
  double rhs = 0.0;           // 3^{r+1} V(g)^r (sup p)^{q/(q+1)} (E|X_T - X^_T|^q)^{1/(q+1)}
  double density_sup = 0.0;   // KDE maximum of X_T
  double moment = 0.0;        // E|X_T - X^_T|^q
  bool holds = false;
};

/// Empirical check of the BV-functional inequality on a recorded ensemble.
AvikainenReport avikainen_check(const PathEnsemble& ensemble, const BvFunction& g, double r, double q);

}  // namespace sdestab
