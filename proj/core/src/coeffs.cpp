#include "sdestab/coeffs.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "sdestab/errors.hpp"
#include "sdestab/rng.hpp"

namespace sdestab {

std::string to_string(CoefficientKind kind) {
  switch (kind) {
    case CoefficientKind::AnalyticForm:
      return "analytic-form";
    case CoefficientKind::Piecewise:
      return "piecewise";
    case CoefficientKind::MollifiedWrapper:
      return "mollified-wrapper";
  }
  return "unknown";
}

Coefficient::Coefficient(std::string name, std::shared_ptr<const CoefficientImpl> impl, Regularity regularity,
                         std::vector<double> breakpoints)
    : name_(std::move(name)), impl_(std::move(impl)), regularity_(regularity), breakpoints_(std::move(breakpoints)) {
  if (!impl_) throw PreconditionError("Coefficient: null implementation");
  if (regularity_.holder && (regularity_.holder->eta < 0.5 || regularity_.holder->eta > 1.0))
    throw DomainError("Coefficient " + name_ + ": holder eta must lie in [1/2, 1]");
  if (regularity_.ellipticity && *regularity_.ellipticity < 1.0)
    throw DomainError("Coefficient " + name_ + ": ellipticity lambda must be >= 1");
  if (regularity_.bound && *regularity_.bound < 0.0) throw DomainError("Coefficient " + name_ + ": negative bound");
  std::sort(breakpoints_.begin(), breakpoints_.end());
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()), breakpoints_.end());
}

double Coefficient::operator()(double x) const {
  if (!std::isfinite(x)) throw DomainError("Coefficient " + name_ + ": non-finite argument");
  return impl_->eval(x);
}

bool Coefficient::is_constant() const noexcept {
  const auto* pc = piecewise();
  return pc != nullptr && pc->breaks.empty();
}

double SdePair::lambda() const {
  const auto& a = exact.diffusion.regularity().ellipticity;
  const auto& b = perturbed.diffusion.regularity().ellipticity;
  if (!a) throw ConfigError("exact.diffusion.ellipticity_lambda", "missing ellipticity metadata");
  if (!b) throw ConfigError("perturbed.diffusion.ellipticity_lambda", "missing ellipticity metadata");
  return std::max(*a, *b);
}

double SdePair::eta() const {
  const auto& a = exact.diffusion.regularity().holder;
  const auto& b = perturbed.diffusion.regularity().holder;
  if (!a) throw ConfigError("exact.diffusion.holder_eta", "missing Hoelder metadata");
  if (!b) throw ConfigError("perturbed.diffusion.holder_eta", "missing Hoelder metadata");
  return std::min(a->eta, b->eta);
}

double SdePair::common_k() const {
  const auto& bd = exact.drift.regularity().bound;
  const auto& bh = perturbed.drift.regularity().bound;
  if (!bd) throw ConfigError("exact.drift.bound_K", "missing bound metadata");
  if (!bh) throw ConfigError("perturbed.drift.bound_K", "missing bound metadata");
  double k = std::max(*bd, *bh);
  for (const auto* c : {&exact.diffusion, &perturbed.diffusion}) {
    if (c->regularity().holder) k = std::max(k, c->regularity().holder->constant);
  }
  return k;
}

// ---- construction --------------------------------------------------------

namespace {

class AnalyticImpl final : public CoefficientImpl {
 public:
  explicit AnalyticImpl(std::function<double(double)> fn) : fn_(std::move(fn)) {}
  double eval(double x) const override { return fn_(x); }
  CoefficientKind kind() const override { return CoefficientKind::AnalyticForm; }

 private:
  std::function<double(double)> fn_;
};

class PiecewiseImpl final : public CoefficientImpl {
 public:
  explicit PiecewiseImpl(PiecewiseConstant steps) : steps_(std::move(steps)) {}
  double eval(double x) const override {
    // x on a break belongs to the left piece.
    const auto it = std::lower_bound(steps_.breaks.begin(), steps_.breaks.end(), x);
    return steps_.values[static_cast<std::size_t>(it - steps_.breaks.begin())];
  }
  CoefficientKind kind() const override { return CoefficientKind::Piecewise; }
  const PiecewiseConstant* piecewise() const override { return &steps_; }

 private:
  PiecewiseConstant steps_;
};

// Shortest representation that round-trips.
std::string fmt_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

Coefficient analytic(std::string name, std::function<double(double)> fn, Regularity regularity,
                     std::vector<double> breakpoints) {
  return Coefficient(std::move(name), std::make_shared<AnalyticImpl>(std::move(fn)), regularity,
                     std::move(breakpoints));
}

Coefficient piecewise_constant(std::string name, PiecewiseConstant steps, Regularity regularity) {
  if (steps.values.size() != steps.breaks.size() + 1)
    throw DomainError("piecewise_constant: need exactly one more value than breaks");
  if (!std::is_sorted(steps.breaks.begin(), steps.breaks.end()) ||
      std::adjacent_find(steps.breaks.begin(), steps.breaks.end()) != steps.breaks.end())
    throw DomainError("piecewise_constant: breaks must be strictly increasing");
  auto breaks = steps.breaks;
  return Coefficient(std::move(name), std::make_shared<PiecewiseImpl>(std::move(steps)), regularity,
                     std::move(breaks));
}

namespace builtin {

Coefficient neg_sign(double scale) {
  if (!(scale >= 0.0)) throw DomainError("neg_sign: scale must be >= 0");
  Regularity r;
  r.bound = scale;
  r.osl = 0.0;
  return piecewise_constant(scale == 1.0 ? "neg_sign" : "neg_sign(" + fmt_double(scale) + ")",
                            PiecewiseConstant{{0.0}, {scale, -scale}}, r);
}

Coefficient pos_sign(double scale) {
  if (!(scale >= 0.0)) throw DomainError("pos_sign: scale must be >= 0");
  Regularity r;
  r.bound = scale;
  return piecewise_constant(scale == 1.0 ? "pos_sign" : "pos_sign(" + fmt_double(scale) + ")",
                            PiecewiseConstant{{0.0}, {-scale, scale}}, r);
}

Coefficient step(double theta, double left, double right) {
  Regularity r;
  r.bound = std::max(std::abs(left), std::abs(right));
  if (left >= right) r.osl = 0.0;
  return piecewise_constant("step(" + fmt_double(theta) + "," + fmt_double(left) + "," + fmt_double(right) + ")",
                            PiecewiseConstant{{theta}, {left, right}}, r);
}

Coefficient constant(double value) {
  Regularity r;
  r.bound = std::abs(value);
  r.osl = 0.0;
  r.holder = HolderSpec{1.0, 0.0};
  if (value != 0.0) r.ellipticity = std::max(value * value, 1.0 / (value * value));
  return piecewise_constant("constant(" + fmt_double(value) + ")", PiecewiseConstant{{}, {value}}, r);
}

Coefficient clipped_linear(double slope, double cap) {
  if (!(cap > 0.0)) throw DomainError("clipped_linear: cap must be > 0");
  Regularity r;
  r.bound = cap;
  r.osl = std::max(slope, 0.0);
  r.holder = HolderSpec{1.0, std::abs(slope)};
  std::vector<double> kinks;
  if (slope != 0.0) kinks = {-cap / std::abs(slope), cap / std::abs(slope)};
  return analytic(
      "clipped_linear(" + fmt_double(slope) + "," + fmt_double(cap) + ")",
      [slope, cap](double x) { return std::clamp(slope * x, -cap, cap); }, r, std::move(kinks));
}

Coefficient holder_diffusion(double c0, double c1, double eta, double center) {
  if (!(c0 > 0.0)) throw DomainError("holder_diffusion: c0 must be > 0");
  if (!(c1 >= 0.0)) throw DomainError("holder_diffusion: c1 must be >= 0");
  if (!(eta >= 0.5 && eta <= 1.0)) throw DomainError("holder_diffusion: eta must lie in [1/2, 1]");
  Regularity r;
  r.bound = c0 + c1;
  r.holder = HolderSpec{eta, c1};
  r.ellipticity = std::max({(c0 + c1) * (c0 + c1), 1.0 / (c0 * c0), 1.0});
  return analytic(
      "holder_diffusion(" + fmt_double(c0) + "," + fmt_double(c1) + "," + fmt_double(eta) + "," +
          fmt_double(center) + ")",
      [=](double x) {
        const double d = std::abs(x - center);
        return c0 + c1 * (d >= 1.0 ? 1.0 : std::pow(d, eta));
      },
      r, {center - 1.0, center, center + 1.0});
}

}  // namespace builtin

// ---- probes -------------------------------------------------------------

namespace {

struct PairSampler {
  Interval domain;
  std::vector<double> anchors;
  ProbeOptions options;
  PhiloxStream rng;

  PairSampler(Interval d, const std::vector<double>& breakpoints, const ProbeOptions& opt, std::uint64_t seed)
      : domain(d), options(opt), rng(seed, 0x0511) {
    for (double c : breakpoints)
      if (c >= d.lo && c <= d.hi) anchors.push_back(c);
  }

  std::pair<double, double> next() {
    const double w = domain.width();
    const double log_lo = std::log(options.min_separation * w);
    const double log_hi = std::log(w);
    const double sep = std::exp(rng.uniform(log_lo, log_hi));
    if (!anchors.empty() && rng.uniform() <= options.anchored_fraction) {
      const auto k = static_cast<std::size_t>(rng() % anchors.size());
      const double u = rng.uniform(0.0, 1.0);
      const double x = std::clamp(anchors[k] + u * sep, domain.lo, domain.hi);
      const double y = std::clamp(anchors[k] - (1.0 - u) * sep, domain.lo, domain.hi);
      return {x, y};
    }
    const double x = rng.uniform(domain.lo, domain.hi);
    double y = rng.uniform() < 0.5 ? x - sep : x + sep;
    if (y < domain.lo || y > domain.hi) y = 2.0 * x - y;
    return {x, std::clamp(y, domain.lo, domain.hi)};
  }
};

// Rounding in f(x) - f(y) is up to eps (|f(x)| + |f(y)|); divided by a tiny
// separation it would show up as a spurious excess, so it is discounted.
double rounding_slack(double fx, double fy) noexcept {
  return 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(fx) + std::abs(fy));
}

void require_domain(Interval d) {
  if (!(d.hi > d.lo) || !std::isfinite(d.lo) || !std::isfinite(d.hi)) throw DomainError("probe: empty domain");
}

}  // namespace

OslProbe probe_one_sided_lipschitz(const Coefficient& c, Interval domain, std::size_t n_pairs, std::uint64_t seed,
                                   double tolerance, const ProbeOptions& options) {
  require_domain(domain);
  if (n_pairs == 0) throw DomainError("probe_one_sided_lipschitz: n_pairs must be >= 1");
  PairSampler sampler(domain, c.breakpoints(), options, seed);

  OslProbe out;
  out.estimate = -std::numeric_limits<double>::infinity();
  double fine = -std::numeric_limits<double>::infinity();
  double coarse = -std::numeric_limits<double>::infinity();
  const double fine_cut = 1e-4 * domain.width();
  const double coarse_cut = 1e-2 * domain.width();
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const auto [x, y] = sampler.next();
    const double d = x - y;
    if (d == 0.0) continue;
    const double fx = c.eval_unchecked(x);
    const double fy = c.eval_unchecked(y);
    const double ratio = ((fx - fy) / d) - rounding_slack(fx, fy) / std::abs(d);
    if (ratio > out.estimate) {
      out.estimate = ratio;
      out.worst_x = x;
      out.worst_y = y;
    }
    if (std::abs(d) <= fine_cut) fine = std::max(fine, ratio);
    if (std::abs(d) >= coarse_cut) coarse = std::max(coarse, ratio);
  }
  out.appears_unbounded = fine > 0.0 && fine > 10.0 * std::max(coarse, 1.0);
  out.declared = c.regularity().osl;
  if (out.declared) out.within_declared = !out.appears_unbounded && out.estimate <= *out.declared + tolerance;
  return out;
}

HolderProbe probe_holder(const Coefficient& c, double eta, Interval domain, std::size_t n_pairs, std::uint64_t seed,
                         const ProbeOptions& options) {
  require_domain(domain);
  PairSampler sampler(domain, c.breakpoints(), options, seed ^ 0x401de7ull);
  HolderProbe out;
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const auto [x, y] = sampler.next();
    const double d = std::abs(x - y);
    if (d == 0.0) continue;
    const double fx = c.eval_unchecked(x);
    const double fy = c.eval_unchecked(y);
    const double ratio = std::max(0.0, std::abs(fx - fy) - rounding_slack(fx, fy)) / std::pow(d, eta);
    if (ratio > out.estimate) {
      out.estimate = ratio;
      out.worst_x = x;
      out.worst_y = y;
    }
  }
  return out;
}

RangeProbe probe_range(const Coefficient& c, Interval domain, std::size_t points) {
  require_domain(domain);
  if (points < 2) throw DomainError("probe_range: need at least 2 points");
  RangeProbe out;
  out.min_value = std::numeric_limits<double>::infinity();
  out.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double x = domain.lo + domain.width() * static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = c.eval_unchecked(x);
    if (v < out.min_value) {
      out.min_value = v;
      out.argmin = x;
    }
    if (v > out.max_value) {
      out.max_value = v;
      out.argmax = x;
    }
  }
  return out;
}

}  // namespace sdestab
