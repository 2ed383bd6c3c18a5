#pragma once

// Scalar SDE coefficients together with the regularity metadata every
// downstream estimate consumes (bound K, one-sided Lipschitz L, Hoelder
// (eta, K), ellipticity lambda).

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sdestab {

enum class CoefficientKind { AnalyticForm, Piecewise, MollifiedWrapper };

std::string to_string(CoefficientKind kind);

struct HolderSpec {
  double eta = 1.0;       // eta = 1/2 + alpha, in [1/2, 1]
  double constant = 0.0;  // K in |c(x) - c(y)| <= K |x - y|^eta
};

struct Regularity {
  std::optional<double> bound;            // sup |c|
  std::optional<double> osl;              // present iff the coefficient is claimed one-sided Lipschitz
  std::optional<HolderSpec> holder;       // present for diffusions
  std::optional<double> ellipticity;      // lambda with 1/lambda <= c^2 <= lambda
};

/// Left-continuous step function: value[i] on (breaks[i-1], breaks[i]].
struct PiecewiseConstant {
  std::vector<double> breaks;  // strictly increasing
  std::vector<double> values;  // breaks.size() + 1 entries
};

class CoefficientImpl {
 public:
  virtual ~CoefficientImpl() = default;
  virtual double eval(double x) const = 0;
  virtual CoefficientKind kind() const = 0;
  virtual const PiecewiseConstant* piecewise() const { return nullptr; }
};

/// Immutable, cheaply copyable coefficient handle. Evaluation is pure and
/// thread-safe.
class Coefficient {
 public:
  Coefficient(std::string name, std::shared_ptr<const CoefficientImpl> impl, Regularity regularity,
              std::vector<double> breakpoints = {});

  /// c(x). Throws DomainError for non-finite x.
  double operator()(double x) const;
  /// c(x) without the argument check, for inner loops.
  double eval_unchecked(double x) const { return impl_->eval(x); }

  const std::string& name() const noexcept { return name_; }
  CoefficientKind kind() const noexcept { return impl_->kind(); }
  const Regularity& regularity() const noexcept { return regularity_; }
  /// Points where the coefficient jumps or has a kink; quadrature panels split here.
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const PiecewiseConstant* piecewise() const noexcept { return impl_->piecewise(); }
  const CoefficientImpl& impl() const noexcept { return *impl_; }
  bool is_constant() const noexcept;

 private:
  std::string name_;
  std::shared_ptr<const CoefficientImpl> impl_;
  Regularity regularity_;
  std::vector<double> breakpoints_;
};

struct CoefficientPair {
  Coefficient drift;
  Coefficient diffusion;
};

/// The two SDEs dX = b(X)dt + sigma(X)dW and dX^ = b^(X^)dt + sigma^(X^)dW,
/// started from the same x0 and driven by the same Brownian motion.
struct SdePair {
  double x0 = 0.0;
  double horizon = 1.0;  // T
  CoefficientPair exact;
  CoefficientPair perturbed;

  /// Max of the two declared ellipticity constants. Throws ConfigError if absent.
  double lambda() const;
  /// Min of the two declared Hoelder exponents. Throws ConfigError if absent.
  double eta() const;
  double alpha() const { return eta() - 0.5; }
  /// Common K of the assumptions: max over drift bounds and diffusion Hoelder constants.
  double common_k() const;

  static SdePair identical(double x0, double horizon, const CoefficientPair& coeffs) {
    return SdePair{x0, horizon, coeffs, coeffs};
  }
};

// ---- construction --------------------------------------------------------

Coefficient analytic(std::string name, std::function<double(double)> fn, Regularity regularity,
                     std::vector<double> breakpoints = {});

Coefficient piecewise_constant(std::string name, PiecewiseConstant steps, Regularity regularity);

namespace builtin {

/// 1_{(-inf,0]}(x) - 1_{(0,inf)}(x), scaled. Decreasing, so one-sided Lipschitz with L = 0.
Coefficient neg_sign(double scale = 1.0);
/// +sign(x) (scaled). Increasing with a jump: not one-sided Lipschitz.
Coefficient pos_sign(double scale = 1.0);
/// `left` on (-inf, theta], `right` on (theta, inf). One-sided Lipschitz iff left >= right.
Coefficient step(double theta, double left, double right);
Coefficient constant(double value);
/// clamp(slope * x, -cap, cap); Lipschitz, one-sided constant max(slope, 0).
Coefficient clipped_linear(double slope, double cap);
/// c0 + c1 * min(|x - center|^eta, 1): eta-Hoelder with constant c1, sigma in [c0, c0 + c1].
Coefficient holder_diffusion(double c0, double c1, double eta, double center = 0.0);

}  // namespace builtin

// ---- probes -------------------------------------------------------------

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const noexcept { return hi - lo; }
};

struct ProbeOptions {
  /// Pair separations are drawn log-uniformly in [min_separation * width, width].
  double min_separation = 1e-6;
  /// Fraction of pairs centred on declared breakpoints, where extremes are attained.
  double anchored_fraction = 0.25;
};

struct OslProbe {
  double estimate = 0.0;  // max over pairs of (x-y)(f(x)-f(y))/|x-y|^2, less the rounding of f(x)-f(y)
  double worst_x = 0.0;
  double worst_y = 0.0;
  std::optional<double> declared;
  std::optional<bool> within_declared;  // estimate <= declared + tolerance
  bool appears_unbounded = false;       // ratio blows up as pairs shrink: not in the class
};

OslProbe probe_one_sided_lipschitz(const Coefficient& c, Interval domain, std::size_t n_pairs, std::uint64_t seed,
                                   double tolerance = 1e-12, const ProbeOptions& options = {});

struct HolderProbe {
  double estimate = 0.0;  // max |c(x)-c(y)|/|x-y|^eta, less the rounding of c(x)-c(y)
  double worst_x = 0.0;
  double worst_y = 0.0;
};

HolderProbe probe_holder(const Coefficient& c, double eta, Interval domain, std::size_t n_pairs, std::uint64_t seed,
                         const ProbeOptions& options = {});

struct RangeProbe {
  double min_value = 0.0;
  double max_value = 0.0;
  double argmin = 0.0;
  double argmax = 0.0;
};

/// Min/max of c over an evenly spaced grid of `points` points on [lo, hi].
RangeProbe probe_range(const Coefficient& c, Interval domain, std::size_t points);

}  // namespace sdestab
