#include "sdestab/yw_functions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "sdestab/errors.hpp"
#include "sdestab/quadrature.hpp"

namespace sdestab {

namespace {

constexpr int kTableDegree = 16;

// exp(-(g(z) - g_min)) with g = 1/((kappa - z)(z - kappa/delta)), written in
// the offset s = z - mid so that nothing cancels: g - g_min = s^2 / (h^2 (h^2 - s^2)).
double shifted_kernel(double z, double mid, double h) noexcept {
  const double s = z - mid;
  const double h2 = h * h;
  const double q = h2 - s * s;
  if (q <= 0.0) return 0.0;
  return std::exp(-(s * s) / (h2 * q));
}

// The kernel is a spike of width ~h^2 around mid when h is small.
std::vector<double> spike_breakpoints(double mid, double h) {
  std::vector<double> out{mid};
  for (double d = 0.25 * h * h; d < h; d *= 2.0) {
    out.push_back(mid - d);
    out.push_back(mid + d);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

YwParams::YwParams(double delta, double kappa) : delta_(delta), kappa_(kappa) {
  if (!(delta > 1.0) || !std::isfinite(delta)) throw DomainError("YwParams: delta must be > 1");
  if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("YwParams: kappa must be in (0, 1)");
  const double lo = support_lo();
  const double hi = support_hi();
  half_width_ = 0.5 * (hi - lo);
  mid_ = 0.5 * (hi + lo);

  const double mid = mid_;
  const double h = half_width_;
  const auto kernel = [mid, h](double z) { return shifted_kernel(z, mid, h); };
  const auto breaks = spike_breakpoints(mid, h);
  const QuadratureSpec tight{1e-14, 30};

  // Cumulative integrals on a fine anchor grid; table values then only need a
  // short integral from the nearest anchor, which keeps them accurate and cheap.
  std::vector<double> anchors;
  {
    const auto edges = panel_edges(lo, hi, breaks);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
      for (int j = 0; j < 32; ++j) anchors.push_back(edges[i] + (edges[i + 1] - edges[i]) * j / 32.0);
    anchors.push_back(hi);
  }
  std::vector<double> cum(anchors.size(), 0.0);
  std::vector<double> cum_moment(anchors.size(), 0.0);
  const auto moment_kernel = [&](double z) { return z * kernel(z); };
  for (std::size_t i = 1; i < anchors.size(); ++i) {
    cum[i] = cum[i - 1] + integrate(kernel, anchors[i - 1], anchors[i], tight).value;
    cum_moment[i] = cum_moment[i - 1] + integrate(moment_kernel, anchors[i - 1], anchors[i], tight).value;
  }
  const double total = cum.back();
  inv_mass_ = 1.0 / total;
  log_mu_ = 1.0 / (h * h) - std::log(total);

  const auto from_anchor = [&](const std::vector<double>& c, const std::function<double(double)>& f, double x) {
    if (x <= lo) return 0.0;
    if (x >= hi) return c.back() * inv_mass_;
    const auto it = std::upper_bound(anchors.begin(), anchors.end(), x);
    const std::size_t k = static_cast<std::size_t>(it - anchors.begin()) - 1;
    return (c[k] + integrate(f, anchors[k], x, tight).value) * inv_mass_;
  };
  const auto partial = [&](double x) { return from_anchor(cum, kernel, x); };
  const auto partial_moment = [&](double x) { return from_anchor(cum_moment, moment_kernel, x); };
  cdf_ = PiecewiseChebyshev::build(partial, lo, hi, kTableDegree, 1e-14, breaks);
  moment_ = PiecewiseChebyshev::build(partial_moment, lo, hi, kTableDegree, 1e-14 * kappa, breaks);

  // Independent check of the normalization on a different panel layout.
  mass_ = integrate([this](double z) { return psi(z); }, lo, hi, QuadratureSpec{1e-12, 40}, std::vector<double>{mid}).value;
}

double YwParams::mu() const noexcept {
  return log_mu_ > std::log(std::numeric_limits<double>::max()) ? std::numeric_limits<double>::infinity()
                                                                 : std::exp(log_mu_);
}

double YwParams::psi(double z) const noexcept {
  if (z <= support_lo() || z >= support_hi()) return 0.0;
  return shifted_kernel(z, mid_, half_width_) * inv_mass_;
}

double YwParams::psi_cdf(double z) const noexcept {
  if (z <= support_lo()) return 0.0;
  if (z >= support_hi()) return 1.0;
  // The interpolant can undershoot by a few ulps next to the support ends.
  return std::clamp(cdf_(z), 0.0, 1.0);
}

double YwParams::psi_first_moment(double z) const noexcept {
  if (z <= support_lo()) return 0.0;
  return std::max(0.0, moment_(std::min(z, support_hi())));
}

double psi(double z, const YwParams& p) noexcept { return p.psi(z); }

double phi_prime(double x, const YwParams& p) noexcept {
  const double v = p.psi_cdf(std::abs(x));
  return x < 0.0 ? -v : v;
}

double phi(double x, const YwParams& p) noexcept {
  // Integration by parts: int_0^r Psi(y) dy = r Psi(r) - int_0^r z psi(z) dz.
  const double r = std::abs(x);
  if (r <= p.support_lo()) return 0.0;
  return std::max(0.0, r * p.psi_cdf(r) - p.psi_first_moment(r));
}

double phi_double_prime(double x, const YwParams& p) {
  if (x == 0.0) throw DomainError("phi_double_prime: undefined at x = 0");
  return p.psi(std::abs(x));
}

double c_delta_kappa(const YwParams& p) noexcept { return p.psi_first_moment(p.support_hi()); }

YwPropertyReport check_yw_properties(const YwParams& p, std::size_t grid_points) {
  if (grid_points < 2) throw DomainError("check_yw_properties: need at least 2 grid points");
  YwPropertyReport r;
  r.delta = p.delta();
  r.kappa = p.kappa();
  r.mass_error = std::abs(p.mass() - 1.0);
  r.prop2_min_ratio = std::numeric_limits<double>::infinity();
  r.prop2_min_ratio_bulk = std::numeric_limits<double>::infinity();
  r.prop3_excess = -std::numeric_limits<double>::infinity();
  r.prop4_excess = -std::numeric_limits<double>::infinity();
  r.prop5_excess = -std::numeric_limits<double>::infinity();

  const double lo = p.support_lo();
  const double hi = p.support_hi();
  const double mid = 0.5 * (lo + hi);
  const double log_delta = std::log(p.delta());
  const double span = 3.0 * p.kappa();
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    if (x == 0.0) continue;
    const double ax = std::abs(x);
    const double d1 = phi_prime(x, p);
    if (ax <= lo) {
      r.prop2_max_zero = std::max(r.prop2_max_zero, std::abs(d1));
    } else {
      r.prop2_min_ratio = std::min(r.prop2_min_ratio, d1 / x);
      if (ax >= mid) r.prop2_min_ratio_bulk = std::min(r.prop2_min_ratio_bulk, d1 / x);
    }
    r.prop3_excess = std::max(r.prop3_excess, std::abs(d1) - 1.0);
    r.prop4_excess = std::max(r.prop4_excess, ax - p.kappa() - phi(x, p));
    if (ax >= lo && ax <= hi) {
      const double d2 = phi_double_prime(x, p);
      const double bound = 2.0 / (ax * log_delta);
      if (d2 - bound > r.prop5_excess) {
        r.prop5_excess = d2 - bound;
        r.prop5_worst_x = x;
      }
      r.prop5_max_ratio = std::max(r.prop5_max_ratio, d2 / bound);
    }
  }
  return r;
}

}  // namespace sdestab
