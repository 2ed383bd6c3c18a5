#include "sdestab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "sdestab/errors.hpp"

namespace sdestab {

Estimate estimate_mean(std::span<const double> samples, std::size_t batches) {
  Estimate est;
  est.count = samples.size();
  if (samples.empty()) return est;

  double sum = 0.0;
  for (double v : samples) sum += v;
  est.mean = sum / static_cast<double>(samples.size());

  double ss = 0.0;
  for (double v : samples) ss += (v - est.mean) * (v - est.mean);
  if (samples.size() > 1) est.std_error = std::sqrt(ss / static_cast<double>(samples.size() - 1)) /
                                          std::sqrt(static_cast<double>(samples.size()));

  batches = std::min(batches, samples.size());
  if (batches < 2) {
    est.ci_low = est.ci_high = est.mean;
    return est;
  }
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * samples.size() / batches;
    const std::size_t hi = (b + 1) * samples.size() / batches;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += samples[i];
    means[b] = s / static_cast<double>(hi - lo);
  }
  double bm = 0.0;
  for (double m : means) bm += m;
  bm /= static_cast<double>(batches);
  double bss = 0.0;
  for (double m : means) bss += (m - bm) * (m - bm);
  const double batch_se = std::sqrt(bss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  const boost::math::students_t dist(static_cast<double>(batches - 1));
  const double q = boost::math::quantile(dist, 0.975);
  est.ci_low = est.mean - q * batch_se;
  est.ci_high = est.mean + q * batch_se;
  return est;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("fit_line: x and y differ in length");
  if (x.size() < 3) throw DomainError("fit_line: at least 3 points required");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("fit_line: x values are all equal");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += r * r;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  fit.slope_std_error = std::sqrt(ssr / (n - 2.0) / sxx);
  return fit;
}

double correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("correlation: need two equal-length samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace sdestab
