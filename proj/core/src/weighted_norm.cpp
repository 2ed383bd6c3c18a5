#include "sdestab/weighted_norm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sdestab/errors.hpp"

namespace sdestab {

WeightedMeasure::WeightedMeasure(double x0_, double lambda_, double horizon_)
    : x0(x0_), lambda(lambda_), horizon(horizon_) {
  if (!(lambda > 0.0)) throw DomainError("WeightedMeasure: lambda must be > 0");
  if (!(horizon > 0.0)) throw DomainError("WeightedMeasure: T must be > 0");
}

double WeightedMeasure::weight(double x) const noexcept {
  const double d = x - x0;
  return std::exp(-d * d / (2.0 * variance()));
}

double WeightedMeasure::total_mass() const noexcept { return std::sqrt(2.0 * std::numbers::pi * variance()); }

WeightedMeasure WeightedMeasure::for_pair(const SdePair& pair) {
  return WeightedMeasure(pair.x0, pair.lambda(), pair.horizon);
}

double truncation_tail_bound(double sup_abs_f_pow_p, const WeightedMeasure& m, double radius) {
  // int_{|u| > R sqrt v} e^{-u^2/(2v)} du = sqrt(2 pi v) erfc(R / sqrt 2)
  return sup_abs_f_pow_p * m.total_mass() * std::erfc(radius / std::numbers::sqrt2);
}

double weighted_lp_integral(const std::function<double(double)>& f, double p, const WeightedMeasure& m,
                            const NormSpec& spec, std::span<const double> breakpoints) {
  if (!(p >= 1.0)) throw DomainError("weighted_lp_norm: p must be >= 1");
  const double half_width = spec.truncation_radius * std::sqrt(m.variance());
  // The weight's own scale gets panel edges too, so narrow features near x0 are not stepped over.
  std::vector<double> edges(breakpoints.begin(), breakpoints.end());
  edges.push_back(m.x0);
  const auto integrand = [&](double x) {
    const double v = std::abs(f(x));
    if (v == 0.0) return 0.0;
    return (p == 1.0 ? v : std::pow(v, p)) * m.weight(x);
  };
  return integrate(integrand, m.x0 - half_width, m.x0 + half_width, spec.quad, edges).value;
}

double weighted_lp_norm(const std::function<double(double)>& f, double p, const WeightedMeasure& m,
                        const NormSpec& spec, std::span<const double> breakpoints) {
  const double integral = weighted_lp_integral(f, p, m, spec, breakpoints);
  return p == 1.0 ? integral : std::pow(integral, 1.0 / p);
}

namespace {

std::vector<double> merged_breakpoints(const Coefficient& a, const Coefficient& b) {
  std::vector<double> out(a.breakpoints());
  out.insert(out.end(), b.breakpoints().begin(), b.breakpoints().end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

EpsilonReport epsilon_p(const SdePair& pair, double p, const WeightedMeasure& m, const NormSpec& spec) {
  if (!(p >= 1.0)) throw DomainError("epsilon_p: p must be >= 1");
  EpsilonReport r;
  r.p = p;
  const auto& b = pair.exact.drift;
  const auto& bh = pair.perturbed.drift;
  const auto& s = pair.exact.diffusion;
  const auto& sh = pair.perturbed.diffusion;

  const auto drift_gap = [&](double x) { return b.eval_unchecked(x) - bh.eval_unchecked(x); };
  const auto diff_gap = [&](double x) { return s.eval_unchecked(x) - sh.eval_unchecked(x); };
  r.drift_term = weighted_lp_integral(drift_gap, p, m, spec, merged_breakpoints(b, bh));
  r.diffusion_term = weighted_lp_integral(diff_gap, 2.0 * p, m, spec, merged_breakpoints(s, sh));
  r.epsilon = std::max(r.drift_term, r.diffusion_term);
  r.below_one = r.epsilon < 1.0;
  // 1/log(1/eps) < 1  <=>  eps < 1/e; eps = 0 gives 1/inf = 0.
  r.log_condition = r.epsilon < std::exp(-1.0);
  const auto& hs = s.regularity().holder;
  const auto& hsh = sh.regularity().holder;
  if (hs && hsh) r.alpha_zero = std::min(hs->eta, hsh->eta) == 0.5;
  return r;
}

EpsilonReport epsilon_p(const SdePair& pair, double p, const NormSpec& spec) {
  return epsilon_p(pair, p, WeightedMeasure::for_pair(pair), spec);
}

}  // namespace sdestab
