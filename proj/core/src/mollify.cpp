#include "sdestab/mollify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdestab/errors.hpp"

namespace sdestab {

namespace {

double unnormalized_bump(double s) noexcept {
  const double q = 1.0 - s * s;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

}  // namespace

BumpKernel::BumpKernel() {
  const QuadratureSpec tight{1e-15, 40};
  const double half_mass = integrate(unnormalized_bump, -1.0, 0.0, tight).value;
  mu_ = 0.5 / half_mass;
  // F(u) for u <= 0. The profile is flat to all orders at -1, so a single
  // low-degree panel there is already exact to rounding.
  left_cdf_ = PiecewiseChebyshev::build(
      [&](double u) { return u <= -1.0 ? 0.0 : 0.5 * integrate(unnormalized_bump, -1.0, u, tight).value / half_mass; },
      -1.0, 0.0, 20, 2e-16);
}

const BumpKernel& BumpKernel::instance() {
  static const BumpKernel kernel;
  return kernel;
}

double BumpKernel::operator()(double x) const noexcept { return mu_ * unnormalized_bump(x); }

double BumpKernel::cdf(double u) const noexcept {
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  if (u == 0.0) return 0.5;
  return u < 0.0 ? left_cdf_(u) : 1.0 - left_cdf_(-u);
}

double bump(double x) noexcept { return BumpKernel::instance()(x); }

double scaled_bump(double n, double x) noexcept { return n * BumpKernel::instance()(n * x); }

namespace {

constexpr int kMemoDegree = 12;
constexpr int kBucketsPerUnitWidth = 4;  // buckets of width 1/(4n)

class MollifiedImpl final : public CoefficientImpl {
 public:
  MollifiedImpl(Coefficient base, int n, MollifyOptions options)
      : base_(std::move(base)), n_(static_cast<double>(n)), options_(options), kernel_(BumpKernel::instance()) {
    if (const auto* steps = base_.piecewise()) {
      closed_form_ = true;
      offset_ = steps->values.front();
      breaks_ = steps->breaks;
      for (std::size_t i = 0; i < steps->breaks.size(); ++i)
        jumps_.push_back(steps->values[i + 1] - steps->values[i]);
    }
    bucket_width_ = 1.0 / (kBucketsPerUnitWidth * n_);
  }

  double eval(double x) const override {
    if (closed_form_) return eval_steps(x);
    if (!options_.memoize) return eval_quadrature(x);
    return eval_memo(x);
  }

  CoefficientKind kind() const override { return CoefficientKind::MollifiedWrapper; }

 private:
  double eval_steps(double x) const noexcept {
    double s = offset_;
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      const double u = n_ * (x - breaks_[i]);
      if (u >= 1.0)
        s += jumps_[i];
      else if (u > -1.0)
        s += jumps_[i] * kernel_.cdf(u);
    }
    return s;
  }

  double eval_quadrature(double x) const {
    const double r = 1.0 / n_;
    const auto integrand = [&](double y) { return base_.eval_unchecked(y) * n_ * kernel_(n_ * (x - y)); };
    return integrate(integrand, x - r, x + r, options_.quad, base_.breakpoints()).value;
  }

  double eval_memo(double x) const {
    const double k = std::floor(x / bucket_width_);
    const auto key = static_cast<std::int64_t>(k);
    const double a = k * bucket_width_;
    const double b = a + bucket_width_;
    {
      std::shared_lock lock(mutex_);
      if (const auto it = memo_.find(key); it != memo_.end()) return lobatto_interpolate(it->second, a, b, x);
    }
    // Node values are a pure function of the bucket, so a racing insert stores the same numbers.
    std::array<double, kMemoDegree + 1> values{};
    const auto nodes = lobatto_nodes(a, b, kMemoDegree);
    for (int j = 0; j <= kMemoDegree; ++j) values[j] = eval_quadrature(nodes[j]);
    {
      std::unique_lock lock(mutex_);
      memo_.try_emplace(key, values);
    }
    return lobatto_interpolate(values, a, b, x);
  }

  Coefficient base_;
  double n_;
  MollifyOptions options_;
  const BumpKernel& kernel_;

  bool closed_form_ = false;
  double offset_ = 0.0;
  std::vector<double> breaks_;
  std::vector<double> jumps_;

  double bucket_width_ = 0.0;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::int64_t, std::array<double, kMemoDegree + 1>> memo_;
};

}  // namespace

Coefficient mollify(const Coefficient& c, int n, const MollifyOptions& options) {
  if (n <= 0) throw DomainError("mollify: n must be a positive integer");
  if (!c.regularity().bound) throw PreconditionError("mollify: coefficient '" + c.name() + "' has no bound");

  std::vector<double> breakpoints;
  const double r = 1.0 / n;
  for (double p : c.breakpoints()) {
    breakpoints.push_back(p - r);
    breakpoints.push_back(p);
    breakpoints.push_back(p + r);
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  return Coefficient("mollified(" + c.name() + ", " + std::to_string(n) + ")",
                     std::make_shared<MollifiedImpl>(c, n, options), c.regularity(), std::move(breakpoints));
}

double mollification_distance_bound(const Coefficient& c, int n, double p, const WeightedMeasure& measure) {
  const auto& holder = c.regularity().holder;
  if (!holder) throw ConfigError("holder_eta", "coefficient '" + c.name() + "' has no Hoelder metadata");
  if (n <= 0) throw DomainError("mollification_distance_bound: n must be positive");
  if (!(p >= 1.0)) throw DomainError("mollification_distance_bound: p must be >= 1");
  const double k_pow = std::pow(holder->constant, 2.0 * p);
  return k_pow * measure.total_mass() / std::pow(static_cast<double>(n), 2.0 * p * holder->eta);
}

}  // namespace sdestab
