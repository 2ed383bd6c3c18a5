#include "sdestab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sdestab/errors.hpp"

namespace sdestab {

std::vector<double> panel_edges(double a, double b, std::span<const double> breakpoints) {
  std::vector<double> edges;
  edges.reserve(breakpoints.size() + 2);
  edges.push_back(a);
  for (double c : breakpoints) {
    if (c > a && c < b) edges.push_back(c);
  }
  edges.push_back(b);
  std::sort(edges.begin() + 1, edges.end() - 1);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

struct Segment {
  double a;
  double b;
  double value;
  double error;
  double l1;
  unsigned depth;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// K61 with the embedded G30; the error estimate is |K - G|. The Gauss nodes
// are the odd-indexed Kronrod abscissae.
Segment gk_segment(const std::function<double(double)>& f, double a, double b, unsigned depth) {
  static const auto& xk = GK::abscissa();
  static const auto& wk = GK::weights();
  static const auto& wg = boost::math::quadrature::gauss<double, 30>::weights();
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double f0 = f(c);
  double k = wk[0] * f0;
  double g = 0.0;
  double l1 = wk[0] * std::abs(f0);
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double fl = f(c - h * xk[i]);
    const double fr = f(c + h * xk[i]);
    k += wk[i] * (fl + fr);
    l1 += wk[i] * (std::abs(fl) + std::abs(fr));
    if (i % 2 == 1) g += wg[i / 2] * (fl + fr);
  }
  return {a, b, k * h, std::abs(k - g) * h, l1 * h, depth};
}

// Globally adaptive bisection: always split the segment with the largest error
// estimate, stop once the summed error is below rel_tol times the summed L1 norm.
// Segments at max_depth, or whose error is at rounding level, are not split.
QuadResult integrate_panel(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec) {
  constexpr std::size_t kMaxSegments = 4000;
  constexpr double kRounding = 64.0 * std::numeric_limits<double>::epsilon();
  std::priority_queue<Segment> open;
  std::vector<Segment> done;
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const auto push = [&](const Segment& s) {
    value += s.value;
    error += s.error;
    l1 += s.l1;
    if (s.depth >= spec.max_depth || s.error <= kRounding * s.l1 || !(0.5 * (s.a + s.b) > s.a))
      done.push_back(s);
    else
      open.push(s);
  };
  push(gk_segment(f, a, b, 0));
  while (!open.empty() && error > spec.rel_tol * l1 && open.size() + done.size() < kMaxSegments) {
    const Segment s = open.top();
    open.pop();
    value -= s.value;
    error -= s.error;
    l1 -= s.l1;
    const double mid = 0.5 * (s.a + s.b);
    push(gk_segment(f, s.a, mid, s.depth + 1));
    push(gk_segment(f, mid, s.b, s.depth + 1));
  }
  // Resum in a fixed order so the running subtractions leave no residue.
  value = 0.0;
  error = 0.0;
  std::vector<Segment> all = std::move(done);
  while (!open.empty()) {
    all.push_back(open.top());
    open.pop();
  }
  std::sort(all.begin(), all.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  for (const auto& s : all) {
    value += s.value;
    error += s.error;
  }
  return {value, error};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec,
                     std::span<const double> breakpoints) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate: interval endpoints must be finite");
  if (a == b) return {};
  if (a > b) {
    auto r = integrate(f, b, a, spec, breakpoints);
    return {-r.value, r.error};
  }
  const auto edges = panel_edges(a, b, breakpoints);
  QuadResult total;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const QuadResult r = integrate_panel(f, edges[i], edges[i + 1], spec);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

}  // namespace sdestab
