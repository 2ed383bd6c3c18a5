#include "sdestab/parametrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sdestab/errors.hpp"
#include "sdestab/kde.hpp"
#include "sdestab/parallel.hpp"
#include "sdestab/rng.hpp"

namespace sdestab {

void FrozenKernelParams::validate() const {
  if (!(t0 > 0.0)) throw DomainError("FrozenKernelParams: t0 must be > 0");
  if (!(K >= 0.0)) throw DomainError("FrozenKernelParams: K must be >= 0");
  if (!(lambda >= 1.0)) throw DomainError("FrozenKernelParams: lambda must be >= 1");
  if (!(eta >= 0.5 && eta <= 1.0)) throw DomainError("FrozenKernelParams: eta must lie in [1/2, 1]");
}

FrozenKernelParams FrozenKernelParams::from_coefficients(const CoefficientPair& coeffs, double t0) {
  const auto& dr = coeffs.drift.regularity();
  const auto& df = coeffs.diffusion.regularity();
  if (!dr.bound) throw ConfigError("drift.bound_K", "missing drift bound");
  if (!df.holder) throw ConfigError("diffusion.holder_eta", "missing Hoelder metadata");
  if (!df.ellipticity) throw ConfigError("diffusion.ellipticity_lambda", "missing ellipticity");
  FrozenKernelParams p{t0, std::max(*dr.bound, df.holder->constant), *df.ellipticity, df.holder->eta};
  p.validate();
  return p;
}

double gaussian_kernel(double c, double t, double x, double z) {
  if (!(t > 0.0)) throw DomainError("gaussian_kernel: t must be > 0");
  if (!(c > 0.0)) throw DomainError("gaussian_kernel: c must be > 0");
  const double d = x - z;
  return std::exp(-d * d / (2.0 * c * t)) / std::sqrt(2.0 * std::numbers::pi * c * t);
}

double frozen_kernel(const CoefficientPair& coeffs, double t, double x, double y, double z) {
  if (!(t > 0.0)) throw DomainError("frozen_kernel: t must be > 0");
  const double s = coeffs.diffusion.eval_unchecked(z);
  const double a = s * s;
  const double u = y - x - coeffs.drift.eval_unchecked(z) * t;
  return std::exp(-u * u / (2.0 * a * t)) / std::sqrt(2.0 * std::numbers::pi * a * t);
}

namespace {

struct ThetaParts {
  double theta;
  double u;   // z - x - b(z) t
  double az;  // a(z)
};

ThetaParts theta_parts(const CoefficientPair& coeffs, double t, double x, double z) {
  const double sx = coeffs.diffusion.eval_unchecked(x);
  const double sz = coeffs.diffusion.eval_unchecked(z);
  const double ax = sx * sx;
  const double az = sz * sz;
  const double bx = coeffs.drift.eval_unchecked(x);
  const double bz = coeffs.drift.eval_unchecked(z);
  const double u = z - x - bz * t;
  const double ta = t * az;
  const double diffusion_part = 0.5 * (ax - az) * (u * u / (ta * ta) - 1.0 / ta);
  const double drift_part = (bx - bz) * u / ta;
  return {diffusion_part + drift_part, u, az};
}

}  // namespace

double theta_hat(const CoefficientPair& coeffs, double t, double x, double z) {
  if (!(t > 0.0)) throw DomainError("theta_hat: t must be > 0");
  return theta_parts(coeffs, t, x, z).theta;
}

double drift_moment_factor(double t, double x, double z, double b, double a) {
  const double w = z - x - b * t;
  return std::abs(w) / std::sqrt(t * a) * std::exp(-w * w / (4.0 * a * t));
}

double holder_moment_factor(double t, double x, double z, double eta, double lambda) {
  const double d = std::abs(x - z);
  return std::pow(d, eta) / std::pow(t, 0.5 * eta) * std::exp(-d * d / (16.0 * lambda * t));
}

double c0_constant(const FrozenKernelParams& p) {
  const double e = std::numbers::e;
  const double shift = p.t0 * p.K * p.K / (4.0 * p.lambda);
  const double drift_term =
      8.0 * p.K * std::pow(p.lambda, 1.5) * std::exp(shift - 0.5) * std::pow(p.t0, 0.5 * (1.0 - p.eta));
  const double diffusion_term = std::pow(2.0, 0.5 * (3.0 * p.eta + 1.0)) * (4.0 + e) * p.K *
                                std::pow(p.lambda, 2.0 + 0.5 * p.eta) * std::exp(shift - 1.0 - 0.5 * p.eta);
  return drift_term + diffusion_term;
}

double theta_bound_ratio(const CoefficientPair& coeffs, const FrozenKernelParams& params, double c0, double t,
                         double x, double z) {
  const auto parts = theta_parts(coeffs, t, x, z);
  if (parts.theta == 0.0) return 0.0;
  if (c0 == 0.0) return std::numeric_limits<double>::infinity();
  const double d = x - z;
  const double c8 = 8.0 * params.lambda;
  // Both Gaussians combined in one exponent; neither is formed on its own.
  const double exponent = -parts.u * parts.u / (2.0 * parts.az * t) + d * d / (2.0 * c8 * t);
  const double norm_ratio = std::sqrt(c8 / parts.az);
  return std::abs(parts.theta) * norm_ratio * std::exp(exponent) / (c0 * std::pow(t, 0.5 * params.eta - 1.0));
}

ThetaBoundReport check_theta_bound(const CoefficientPair& coeffs, const FrozenKernelParams& params,
                                   std::size_t n_samples, std::uint64_t seed, double c0_scale) {
  params.validate();
  ThetaBoundReport r;
  r.c0 = c0_scale * c0_constant(params);
  r.samples = n_samples;

  std::vector<double> anchors(coeffs.drift.breakpoints());
  anchors.insert(anchors.end(), coeffs.diffusion.breakpoints().begin(), coeffs.diffusion.breakpoints().end());
  if (anchors.empty()) anchors.push_back(0.0);

  PhiloxStream rng(seed, 0x7e7a);
  const double window = 10.0 * std::sqrt(8.0 * params.lambda * params.t0);
  const double log_t_lo = std::log(1e-6 * params.t0);
  const double log_t_hi = std::log(params.t0);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = rng.uniform() < 0.5 ? std::exp(rng.uniform(log_t_lo, log_t_hi)) : params.t0 * rng.uniform();
    const double centre = anchors[rng() % anchors.size()];
    const double x = rng.uniform() < 0.5 ? centre + 2.0 * std::sqrt(t) * rng.normal()
                                         : centre + rng.uniform(-window, window);
    const double z = rng.uniform() < 0.5 ? x + 2.0 * std::sqrt(t) * rng.normal() : x + rng.uniform(-window, window);
    const double ratio = theta_bound_ratio(coeffs, params, r.c0, t, x, z);
    if (ratio > 1.0 + 1e-9) ++r.violations;
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.worst_t = t;
      r.worst_x = x;
      r.worst_z = z;
    }
  }
  return r;
}

double frozen_kernel_factor(const FrozenKernelParams& p) {
  return std::sqrt(8.0) * p.lambda * std::exp(0.5 * p.lambda * p.K * p.K * p.t0);
}

double series_majorant(int m, double t, const FrozenKernelParams& params) {
  if (m < 1) throw DomainError("series_majorant: m must be >= 1");
  if (!(t > 0.0)) throw DomainError("series_majorant: t must be > 0");
  const double half_eta = 0.5 * params.eta;
  const double base = c0_constant(params) * std::tgamma(half_eta) * std::pow(t, half_eta);
  if (base == 0.0) return 0.0;
  return frozen_kernel_factor(params) * std::exp(m * std::log(base) - std::lgamma(1.0 + m * half_eta));
}

double series_majorant_tail(int order, double t, const FrozenKernelParams& params) {
  if (order < 0) throw DomainError("series_majorant_tail: order must be >= 0");
  double sum = 0.0;
  double previous = 0.0;
  for (int m = order + 1; m < order + 200000; ++m) {
    const double term = series_majorant(m, t, params);
    if (!std::isfinite(term)) return std::numeric_limits<double>::infinity();
    sum += term;
    // Past the peak the terms decay faster than geometrically.
    if (term < previous && term <= 1e-17 * sum) break;
    previous = term;
  }
  return sum;
}

namespace {

constexpr std::size_t kChunk = 4096;

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * d * d / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
}

struct ChunkSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

class TermSampler {
 public:
  TermSampler(const CoefficientPair& coeffs, const FrozenKernelParams& params, int m, double t, double y, double x0)
      : coeffs_(coeffs), m_(m), t_(t), y_(y), x0_(x0), half_eta_(0.5 * params.eta),
        bridge_var_(1.2 * params.lambda) {
    log_dirichlet_norm_ = std::lgamma(m * half_eta_ + 1.0) - m * std::lgamma(half_eta_);
  }

  double sample(PhiloxStream& rng) const {
    // Gaps g_0..g_{m-1} between consecutive times, then t_m itself.
    double gaps[8];
    double total = 0.0;
    for (int i = 0; i < m_; ++i) total += (gaps[i] = rng.gamma(half_eta_));
    total += (gaps[m_] = rng.gamma(1.0));
    double log_q = log_dirichlet_norm_ - m_ * std::log(t_);
    for (int i = 0; i <= m_; ++i) {
      gaps[i] *= t_ / total;
      if (!(gaps[i] > 0.0)) return 0.0;
      if (i < m_) log_q += (half_eta_ - 1.0) * std::log(gaps[i] / t_);
    }
    double times[9];  // times[i] = t_i, times[0] = t
    times[0] = t_;
    for (int i = 0; i < m_; ++i) times[i + 1] = times[i] - gaps[i];

    // Brownian bridge from (0, x0) to (t, y) through t_m, ..., t_1.
    double points[10];  // points[i] = y_i, points[0] = y, points[m+1] = x0
    points[0] = y_;
    points[m_ + 1] = x0_;
    double s_prev = 0.0;
    double y_prev = x0_;
    for (int j = m_; j >= 1; --j) {
      const double tj = times[j];
      const double frac = (tj - s_prev) / (t_ - s_prev);
      const double mean = y_prev + (y_ - y_prev) * frac;
      const double var = bridge_var_ * (tj - s_prev) * (t_ - tj) / (t_ - s_prev);
      if (!(var > 0.0)) return 0.0;
      const double yj = mean + std::sqrt(var) * rng.normal();
      log_q += log_normal_pdf(yj, mean, var);
      points[j] = yj;
      s_prev = tj;
      y_prev = yj;
    }

    double value = frozen_kernel(coeffs_, times[m_], x0_, points[m_], points[m_]);
    for (int i = 0; i < m_ && value != 0.0; ++i) {
      const double g = gaps[i];
      value *= theta_hat(coeffs_, g, points[i + 1], points[i]) *
               frozen_kernel(coeffs_, g, points[i + 1], points[i], points[i]);
    }
    if (value == 0.0) return 0.0;
    return value * std::exp(-log_q);
  }

 private:
  const CoefficientPair& coeffs_;
  int m_;
  double t_;
  double y_;
  double x0_;
  double half_eta_;
  double bridge_var_;
  double log_dirichlet_norm_ = 0.0;
};

}  // namespace

McValue parametrix_term(const CoefficientPair& coeffs, const FrozenKernelParams& params, int m, double t, double y,
                        double x0, const IntegratorSpec& spec) {
  params.validate();
  if (m < 1 || m > 2) throw PreconditionError("parametrix_term: order must be 1 or 2");
  if (!(t > 0.0)) throw DomainError("parametrix_term: t must be > 0");

  const TermSampler sampler(coeffs, params, m, t, y, x0);
  const std::uint64_t seed = mix_seed(spec.seed, static_cast<std::uint64_t>(m));
  std::vector<ChunkSums> chunks;
  std::size_t target_chunks = std::max<std::size_t>(1, (spec.min_samples + kChunk - 1) / kChunk);
  const std::size_t max_chunks = std::max<std::size_t>(target_chunks, (spec.max_samples + kChunk - 1) / kChunk);

  McValue out;
  for (;;) {
    const std::size_t first = chunks.size();
    chunks.resize(target_chunks);
    parallel_for(
        target_chunks - first, spec.workers,
        [&](std::size_t k) {
          const std::size_t c = first + k;
          PhiloxStream rng(seed, c);
          ChunkSums s;
          for (std::size_t i = 0; i < kChunk; ++i) {
            const double w = sampler.sample(rng);
            s.sum += w;
            s.sum_sq += w * w;
          }
          chunks[c] = s;
        },
        1);

    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& c : chunks) {
      sum += c.sum;
      sum_sq += c.sum_sq;
    }
    const double n = static_cast<double>(chunks.size() * kChunk);
    out.samples = chunks.size() * kChunk;
    out.value = sum / n;
    const double var = std::max(sum_sq / n - out.value * out.value, 0.0) * n / (n - 1.0);
    out.std_error = std::sqrt(var / n);

    const double target = std::max(spec.target_abs_error, spec.target_rel_error * std::abs(out.value));
    if (out.std_error <= target) break;
    if (chunks.size() >= max_chunks) {
      out.low_precision = true;
      break;
    }
    target_chunks = std::min(max_chunks, 2 * chunks.size());
  }
  return out;
}

DensityEstimate density_estimate(const CoefficientPair& coeffs, const FrozenKernelParams& params, double t, double y,
                                 double x0, int order, const IntegratorSpec& spec) {
  if (order < 0 || order > 2) throw PreconditionError("density_estimate: order must be in [0, 2]");
  DensityEstimate d;
  d.frozen = frozen_kernel(coeffs, t, x0, y, y);
  d.total = d.frozen;
  for (int m = 1; m <= order; ++m) {
    d.corrections.push_back(parametrix_term(coeffs, params, m, t, y, x0, spec));
    d.total += d.corrections.back().value;
    d.low_precision = d.low_precision || d.corrections.back().low_precision;
  }
  d.tail_bound = series_majorant_tail(order, t, params) * gaussian_kernel(8.0 * params.lambda, t, x0, y);
  return d;
}

GaussianBoundCertificate certify_gaussian_bound(double t, double x0, double lambda, std::span<const double> samples,
                                                const GaussianBoundOptions& options) {
  if (!(t > 0.0)) throw DomainError("certify_gaussian_bound: t must be > 0");
  if (options.grid_points < 3) throw DomainError("certify_gaussian_bound: need at least 3 grid points");
  const KernelDensity kde(samples);
  GaussianBoundCertificate cert;
  cert.bandwidth = kde.bandwidth();

  const double c8 = 8.0 * lambda;
  const double half = 10.0 * std::sqrt(c8 * t);
  const double lo = x0 - half;
  const double hi = x0 + half;
  std::size_t first_supported = options.grid_points;
  std::size_t last_supported = 0;
  std::size_t best = options.grid_points;
  double best_ratio = -1.0;
  for (std::size_t i = 0; i < options.grid_points; ++i) {
    const double y = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(options.grid_points - 1);
    if (kde.count_within(y, 2.0 * cert.bandwidth) < options.min_support) continue;
    first_supported = std::min(first_supported, i);
    last_supported = i;
    const double ratio = kde(y) / gaussian_kernel(c8, t, x0, y);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best = i;
    }
  }
  if (best == options.grid_points) {
    cert.warnings.push_back("no grid point has adequate sample support");
    return cert;
  }
  const auto grid_y = [&](std::size_t i) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(options.grid_points - 1);
  };
  cert.region_lo = grid_y(first_supported);
  cert.region_hi = grid_y(last_supported);
  cert.argmax = grid_y(best);
  cert.c_hat = best_ratio;
  cert.c_hat_std_error = kde.std_error(cert.argmax) / gaussian_kernel(c8, t, x0, cert.argmax);
  cert.finite = std::isfinite(cert.c_hat);
  cert.edge_dominated = best == first_supported || best == last_supported;
  if (first_supported > 0 || last_supported + 1 < options.grid_points)
    cert.warnings.push_back("tails lack sample support; region shrunk");
  if (cert.edge_dominated) cert.warnings.push_back("maximum sits on the edge of the supported region");
  return cert;
}

}  // namespace sdestab
