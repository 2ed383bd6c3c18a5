#include "sdestab/rate_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sdestab/errors.hpp"
#include "sdestab/kde.hpp"
#include "sdestab/rng.hpp"

namespace sdestab {

std::string to_string(Theorem t) {
  switch (t) {
    case Theorem::StoppedL1: return "stopped";
    case Theorem::SupL1: return "sup";
    case Theorem::LpMoment: return "p-moment";
    case Theorem::LpJensen: return "p-jensen";
    case Theorem::Bv: return "bv";
  }
  return "?";
}

Theorem theorem_from_string(const std::string& s) {
  for (Theorem t : {Theorem::StoppedL1, Theorem::SupL1, Theorem::LpMoment, Theorem::LpJensen, Theorem::Bv})
    if (to_string(t) == s) return t;
  throw ConfigError("experiment.error_kind", "unknown error kind '" + s + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "consistent";
    case Verdict::Inconsistent: return "inconsistent";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

ExponentInfo theoretical_exponent(double alpha, Theorem theorem, double p) {
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw DomainError("theoretical_exponent: alpha must lie in [0, 1/2]");
  if (theorem == Theorem::LpMoment && !(p >= 2.0)) throw DomainError("theoretical_exponent: p-moment needs p >= 2");
  if (theorem == Theorem::LpJensen && !(p > 1.0 && p < 2.0))
    throw DomainError("theoretical_exponent: p-jensen needs p in (1, 2)");

  ExponentInfo e;
  const auto logarithmic = [&](double power, const char* formula) {
    e.mode = RateMode::Logarithmic;
    e.exponent = 1.0;
    e.log_power = power;
    e.epsilon_order = 1.0;
    e.formula = formula;
    return e;
  };
  const auto power = [&](double exponent, double order, const char* formula) {
    e.mode = RateMode::Power;
    e.exponent = exponent;
    e.epsilon_order = order;
    e.formula = formula;
    return e;
  };
  const double two_a = 2.0 * alpha / (2.0 * alpha + 1.0);
  const double one_a = alpha / (2.0 * alpha + 1.0);

  switch (theorem) {
    case Theorem::StoppedL1:
      if (alpha == 0.0) return logarithmic(1.0, "1/log(1/eps_1)");
      return power(two_a, 1.0, "eps_1^{2a/(2a+1)}");
    case Theorem::SupL1:
      if (alpha == 0.0) return logarithmic(0.5, "1/sqrt(log(1/eps_1))");
      return power(alpha, 1.0, "eps_1^a");
    case Theorem::LpMoment:
      if (alpha == 0.0) return logarithmic(1.0, "1/log(1/eps_1)");
      if (alpha == 0.5) return power(0.5, p, "eps_p^{1/2}");
      return power(two_a, 1.0, "eps_1^{2a/(2a+1)}");
    case Theorem::LpJensen:
      if (alpha == 0.0) return logarithmic(0.5, "1/sqrt(log(1/eps_1))");
      if (alpha == 0.5) return power(0.5, 2.0 * p, "eps_{2p}^{1/2}");
      return power(one_a, 1.0, "eps_1^{a/(2a+1)}");
    case Theorem::Bv:
      if (alpha == 0.0) return logarithmic(0.5, "V^r/sqrt(log(1/eps_1))");
      return power(one_a, 1.0, "V^r eps_1^{a/(2a+1)}");
  }
  return e;
}

LineFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("fit_loglog: size mismatch");
  if (x.size() < 3) throw PreconditionError("fit_loglog: need at least 3 points");
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("fit_loglog: values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_line(lx, ly);
}

double rate_axis(double eps, const ExponentInfo& info) {
  if (info.mode == RateMode::Power) return eps;
  if (!(eps > 0.0 && eps < 1.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::pow(std::log(1.0 / eps), -info.log_power);
}

void RateExperimentConfig::validate() const {
  if (n_ladder.size() < 3) throw PreconditionError("n_ladder: need at least 3 entries for a slope fit");
  for (std::size_t i = 0; i < n_ladder.size(); ++i) {
    if (n_ladder[i] <= 0) throw PreconditionError("n_ladder: entries must be positive");
    if (i > 0 && n_ladder[i] <= n_ladder[i - 1]) throw PreconditionError("n_ladder: must be strictly increasing");
  }
  if (!(p >= 1.0)) throw DomainError("p must be >= 1");
  if (!(r >= 1.0)) throw DomainError("r must be >= 1");
  if (!(slope_tolerance >= 0.0)) throw DomainError("slope_tolerance must be >= 0");
  plan.validate();
}

CoefficientPair mollified_pair(const CoefficientPair& base, int n, const MollifyOptions& options) {
  return {base.drift.is_constant() ? base.drift : mollify(base.drift, n, options),
          base.diffusion.is_constant() ? base.diffusion : mollify(base.diffusion, n, options)};
}

namespace {

std::vector<StoppingRule> default_family(double horizon) {
  return {StoppingRule::at(0.25 * horizon), StoppingRule::at(0.5 * horizon), StoppingRule::at(horizon),
          StoppingRule::exit(0.5), StoppingRule::exit(1.0)};
}

struct Measured {
  Estimate estimate;
  std::string rule;
};

// The error functional of `theorem` on one ensemble.
Measured measure(const PathEnsemble& e, Theorem theorem, double p, const BvFunction& bv, double r) {
  switch (theorem) {
    case Theorem::StoppedL1: {
      Measured best;
      bool first = true;
      for (const auto& rule : e.rules) {
        const Estimate est = stopped_error(e, rule);
        if (first || est.mean > best.estimate.mean) {
          best = {est, rule.label()};
          first = false;
        }
      }
      return best;
    }
    case Theorem::SupL1: return {e.mean_sup_error(), ""};
    case Theorem::LpMoment:
    case Theorem::LpJensen: return {pth_moment_sup_error(e, p), ""};
    case Theorem::Bv: return {bv_error(e, bv.name, r), ""};
  }
  return {};
}

}  // namespace

RateFit run_stability_experiment(const RateExperimentConfig& cfg) {
  cfg.validate();
  RateFit fit;
  fit.theorem = cfg.theorem;
  fit.alpha = cfg.base.exact.diffusion.regularity().holder ? cfg.base.alpha() : 0.5;
  if (cfg.base.exact.diffusion.is_constant() && !cfg.base.exact.diffusion.regularity().holder) fit.alpha = 0.5;
  fit.exponent = theoretical_exponent(fit.alpha, cfg.theorem, cfg.p);

  SimulationPlan plan = cfg.plan;
  plan.record_sup = true;
  plan.record_terminal = true;
  if (cfg.theorem == Theorem::StoppedL1)
    plan.stopping = cfg.stopping_family.empty() ? default_family(cfg.base.horizon) : cfg.stopping_family;
  if (cfg.theorem == Theorem::Bv) plan.bv = {cfg.bv};

  SdePair last_pair = cfg.base;
  SimulationPlan last_plan = plan;
  for (int n : cfg.n_ladder) {
    RatePoint pt;
    pt.n = n;
    pt.seed = mix_seed(cfg.plan.seed, static_cast<std::uint64_t>(n));
    SdePair pair = cfg.base;
    pair.perturbed = mollified_pair(cfg.base.exact, n, cfg.mollify);
    pt.eps = epsilon_p(pair, fit.exponent.epsilon_order, cfg.norm);
    pt.epsilon = pt.eps.epsilon;
    pt.axis = rate_axis(pt.epsilon, fit.exponent);

    SimulationPlan entry = plan;
    entry.seed = pt.seed;
    const Measured m = measure(simulate_pair(pair, entry), cfg.theorem, cfg.p, cfg.bv, cfg.r);
    pt.error = m.estimate;
    pt.rule = m.rule;

    if (!(pt.epsilon < 1.0)) {
      pt.note = "epsilon >= 1";
      fit.warnings.push_back("n=" + std::to_string(n) + ": epsilon >= 1, excluded");
    } else if (!(pt.epsilon > 0.0)) {
      pt.note = "epsilon = 0";
    } else if (!pt.error.ci_excludes_zero() || !(pt.error.mean > 0.0)) {
      pt.note = "error CI contains 0";
    } else {
      pt.used = true;
    }
    fit.points.push_back(pt);
    last_pair = pair;
    last_plan = entry;
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& pt : fit.points)
    if (pt.used) {
      xs.push_back(pt.axis);
      ys.push_back(pt.error.mean);
    }

  if (xs.size() < 3) {
    fit.verdict = Verdict::Inconclusive;
    fit.warnings.push_back("fewer than 3 usable points; fit refused");
  } else {
    const LineFit lf = fit_loglog(xs, ys);
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.r_squared = lf.r_squared;
    fit.slope_std_error = lf.slope_std_error;
    fit.correlation = correlation(xs, ys);
    fit.verdict = fit.slope >= fit.exponent.exponent - cfg.slope_tolerance ? Verdict::Consistent
                                                                          : Verdict::Inconsistent;
  }

  if (cfg.grid_doubling && last_plan.steps >= 4) {
    const Theorem th = cfg.theorem;
    const double p = cfg.p;
    const double r = cfg.r;
    const BvFunction bv = cfg.bv;
    fit.doubling = grid_doubling(last_pair, last_plan, [&](const PathEnsemble& e) {
      return measure(e, th, p, bv, r).estimate.mean;
    });
  }
  return fit;
}

KeyEstimateReport key_estimate_check(const SdePair& pair, const SimulationPlan& plan, const NormSpec& norm) {
  SimulationPlan sp = plan;
  sp.record_key_integrals = true;
  sp.key_p = 1.0;
  sp.record_full_paths = false;
  const PathEnsemble e = simulate_pair(pair, sp);

  KeyEstimateReport rep;
  rep.drift_integral = estimate_mean(e.key_drift);
  rep.diffusion_integral = estimate_mean(e.key_diffusion);
  const EpsilonReport eps = epsilon_p(pair, 1.0, norm);
  rep.drift_norm = eps.drift_term;
  rep.diffusion_norm = eps.diffusion_term;

  const auto ratio = [&](double num, double den) {
    if (den > 0.0) return num / den;
    if (num != 0.0) rep.flagged = true;
    return 0.0;
  };
  rep.drift_ratio = ratio(rep.drift_integral.mean, rep.drift_norm);
  rep.diffusion_ratio = ratio(rep.diffusion_integral.mean, rep.diffusion_norm);
  return rep;
}

KeyLadderReport key_estimate_ladder(const SdePair& base, const std::vector<int>& ladder, const SimulationPlan& plan,
                                    const MollifyOptions& mollify, const NormSpec& norm) {
  KeyLadderReport rep;
  std::vector<double> drift;
  std::vector<double> diffusion;
  for (int n : ladder) {
    SdePair pair = base;
    pair.perturbed = mollified_pair(base.exact, n, mollify);
    SimulationPlan entry = plan;
    entry.seed = mix_seed(plan.seed, static_cast<std::uint64_t>(n));
    const KeyEstimateReport k = key_estimate_check(pair, entry, norm);
    rep.n.push_back(n);
    rep.entries.push_back(k);
    if (k.drift_norm > 0.0) drift.push_back(k.drift_ratio);
    if (k.diffusion_norm > 0.0) diffusion.push_back(k.diffusion_ratio);
  }
  const auto band = [](const std::vector<double>& v) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
  };
  rep.drift_band = band(drift);
  rep.diffusion_band = band(diffusion);
  return rep;
}

AvikainenReport avikainen_check(const PathEnsemble& e, const BvFunction& g, double r, double q) {
  if (!(r >= 1.0) || !(q > 0.0)) throw DomainError("avikainen_check: need r >= 1 and q > 0");
  if (e.terminal_x.empty()) throw PreconditionError("avikainen_check: terminal values were not recorded");

  std::vector<double> lhs(e.paths);
  std::vector<double> mom(e.paths);
  for (std::size_t i = 0; i < e.paths; ++i) {
    lhs[i] = std::pow(std::abs(g.g(e.terminal_x[i]) - g.g(e.terminal_xhat[i])), r);
    mom[i] = std::pow(std::abs(e.terminal_x[i] - e.terminal_xhat[i]), q);
  }
  AvikainenReport rep;
  const Estimate l = estimate_mean(lhs);
  rep.lhs = l.mean;
  rep.lhs_std_error = l.std_error;
  rep.moment = estimate_mean(mom).mean;

  const KernelDensity kde(e.terminal_x);
  const auto grid = kde_density(kde, kde.min(), kde.max(), 2001);
  rep.density_sup = *std::max_element(grid.begin(), grid.end());
  rep.rhs = std::pow(3.0, r + 1.0) * std::pow(g.total_variation, r) * std::pow(rep.density_sup, q / (q + 1.0)) *
            std::pow(rep.moment, 1.0 / (q + 1.0));
  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

}  // namespace sdestab
