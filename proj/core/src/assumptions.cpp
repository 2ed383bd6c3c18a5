#include "sdestab/assumptions.hpp"

#include <cmath>
#include <stdexcept>

#include "sdestab/errors.hpp"
#include "sdestab/rng.hpp"

namespace sdestab {

bool AssumptionReport::all_pass() const noexcept {
  for (const auto& c : conditions)
    if (!c.pass) return false;
  return !conditions.empty();
}

const ConditionResult& AssumptionReport::at(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw std::out_of_range("no condition named " + name);
}

namespace {

struct Named {
  const Coefficient* coeff;
  std::string path;  // e.g. "exact.drift"
};

template <class T>
const T& require(const std::optional<T>& field, const std::string& path) {
  if (!field) throw ConfigError(path, "metadata required by the assumption check is missing");
  return *field;
}

std::vector<double> grid(Interval d, std::size_t points) {
  std::vector<double> xs(points);
  if (points == 1) {
    xs[0] = 0.5 * (d.lo + d.hi);
    return xs;
  }
  for (std::size_t i = 0; i < points; ++i)
    xs[i] = d.lo + d.width() * static_cast<double>(i) / static_cast<double>(points - 1);
  return xs;
}

ConditionResult check_osl(const std::vector<Named>& drifts, Interval domain, const SamplingSpec& spec) {
  ConditionResult r;
  r.name = "A-(i)";
  r.pass = true;
  r.measured = -INFINITY;
  for (std::size_t i = 0; i < drifts.size(); ++i) {
    const auto& [c, path] = drifts[i];
    const double declared = require(c->regularity().osl, path + ".osl_L");
    const auto probe = probe_one_sided_lipschitz(*c, domain, spec.osl_pairs, mix_seed(spec.seed, i), spec.osl_tolerance);
    const bool ok = probe.within_declared.value_or(false);
    // Keep the first failure; while everything passes, keep the largest estimate.
    if (r.pass && (!ok || probe.estimate > r.measured)) {
      r.measured = probe.estimate;
      r.declared = declared;
      r.coefficient = path;
      r.witness_x = probe.worst_x;
      r.witness_y = probe.worst_y;
    }
    if (!ok && r.pass)
      r.detail = path + (probe.appears_unbounded ? " appears not one-sided Lipschitz" : " exceeds declared L");
    r.pass = r.pass && ok;
  }
  return r;
}

ConditionResult check_bound(const std::vector<Named>& drifts, const std::vector<double>& xs) {
  ConditionResult r;
  r.name = "A-(ii)";
  r.pass = true;
  for (const auto& [c, path] : drifts) {
    const double declared = require(c->regularity().bound, path + ".bound_K");
    for (double x : xs) {
      const double v = std::abs(c->eval_unchecked(x));
      const bool ok = v <= declared * (1.0 + 1e-12);
      if (v > r.measured || (!ok && r.pass)) {
        r.measured = v;
        r.declared = declared;
        r.coefficient = path;
        r.witness_x = x;
      }
      if (!ok) r.pass = false;
    }
  }
  return r;
}

ConditionResult check_holder(const std::vector<Named>& diffusions, Interval domain, const SamplingSpec& spec) {
  ConditionResult r;
  r.name = "A-(iii)";
  r.pass = true;
  double worst_excess = -INFINITY;
  for (std::size_t i = 0; i < diffusions.size(); ++i) {
    const auto& [c, path] = diffusions[i];
    const auto& holder = require(c->regularity().holder, path + ".holder_eta");
    const auto probe = probe_holder(*c, holder.eta, domain, spec.holder_pairs, mix_seed(spec.seed, 100 + i));
    const double excess = probe.estimate - holder.constant;
    if (excess > worst_excess) {
      worst_excess = excess;
      r.measured = probe.estimate;
      r.declared = holder.constant;
      r.coefficient = path;
      r.witness_x = probe.worst_x;
      r.witness_y = probe.worst_y;
    }
  }
  r.pass = worst_excess <= spec.holder_tolerance;
  if (!r.pass) r.detail = r.coefficient + " exceeds declared Hoelder constant";
  return r;
}

ConditionResult check_ellipticity(const std::vector<Named>& diffusions, const std::vector<double>& xs,
                                  const SamplingSpec& spec) {
  ConditionResult r;
  r.name = "A-(iv)";
  r.pass = true;
  double worst_excess = -INFINITY;
  for (const auto& [c, path] : diffusions) {
    const double lambda = require(c->regularity().ellipticity, path + ".ellipticity_lambda");
    for (double x : xs) {
      const double s = c->eval_unchecked(x);
      const double a = s * s;
      // Positive excess means a violation of one side of the band.
      const double excess = std::max(a - lambda, 1.0 / lambda - a);
      if (excess > worst_excess) {
        worst_excess = excess;
        r.measured = a;
        r.declared = lambda;
        r.coefficient = path;
        r.witness_x = x;
      }
    }
  }
  r.pass = worst_excess <= spec.ellipticity_tolerance;
  if (!r.pass) r.detail = r.coefficient + ": sigma^2 outside [1/lambda, lambda]";
  return r;
}

}  // namespace

AssumptionReport check_assumptions(const SdePair& pair, double p, const SamplingSpec& spec) {
  if (spec.grid_points == 0) throw DomainError("check_assumptions: grid must be nonempty");
  if (!(p >= 1.0)) throw DomainError("check_assumptions: p must be >= 1");

  const std::vector<Named> drifts{{&pair.exact.drift, "exact.drift"}, {&pair.perturbed.drift, "perturbed.drift"}};
  const std::vector<Named> diffusions{{&pair.exact.diffusion, "exact.diffusion"},
                                      {&pair.perturbed.diffusion, "perturbed.diffusion"}};

  const WeightedMeasure measure = WeightedMeasure::for_pair(pair);
  AssumptionReport report;
  if (spec.domain) {
    report.domain = *spec.domain;
  } else {
    const double half = spec.norm.truncation_radius * std::sqrt(measure.variance());
    report.domain = {pair.x0 - half, pair.x0 + half};
  }
  const auto xs = grid(report.domain, spec.grid_points);

  report.conditions.push_back(check_osl(drifts, report.domain, spec));
  report.conditions.push_back(check_bound(drifts, xs));
  report.conditions.push_back(check_holder(diffusions, report.domain, spec));
  report.conditions.push_back(check_ellipticity(diffusions, xs, spec));

  report.epsilon = epsilon_p(pair, p, measure, spec.norm);
  ConditionResult ap;
  ap.name = "A-(p)";
  ap.measured = report.epsilon.epsilon;
  ap.declared = 1.0;
  ap.pass = report.epsilon.meets_assumption();
  if (!report.epsilon.below_one)
    ap.detail = "epsilon_p >= 1";
  else if (!ap.pass)
    ap.detail = "alpha = 0 and 1/log(1/epsilon_p) >= 1";
  report.conditions.push_back(ap);
  return report;
}

}  // namespace sdestab
