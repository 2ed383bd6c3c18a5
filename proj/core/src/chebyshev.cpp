#include "sdestab/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdestab/errors.hpp"
#include "sdestab/quadrature.hpp"

namespace sdestab {

std::vector<double> lobatto_nodes(double a, double b, int degree) {
  std::vector<double> nodes(degree + 1);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int j = 0; j <= degree; ++j) nodes[j] = mid + half * std::cos(std::numbers::pi * j / degree);
  // Pin endpoints exactly; neighbouring panels then share values.
  nodes.front() = b;
  nodes.back() = a;
  return nodes;
}

namespace {

constexpr int kMaxCachedDegree = 64;

const std::vector<double>& reference_nodes(int degree) {
  static const auto table = [] {
    std::vector<std::vector<double>> t(kMaxCachedDegree + 1);
    for (int n = 1; n <= kMaxCachedDegree; ++n) {
      t[n].resize(n + 1);
      for (int j = 0; j <= n; ++j) t[n][j] = std::cos(std::numbers::pi * j / n);
    }
    return t;
  }();
  return table[degree];
}

}  // namespace

double lobatto_interpolate(std::span<const double> values, double a, double b, double x) noexcept {
  const int degree = static_cast<int>(values.size()) - 1;
  const auto& ref = reference_nodes(degree);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double t = (x - mid) / half;
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j <= degree; ++j) {
    const double diff = t - ref[j];
    if (diff == 0.0) return values[j];
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == degree) w *= 0.5;
    w /= diff;
    num += w * values[j];
    den += w;
  }
  return num / den;
}

PiecewiseChebyshev PiecewiseChebyshev::build(const std::function<double(double)>& f, double a, double b, int degree,
                                             double abs_tol, std::span<const double> initial_edges, int max_panels) {
  if (!(b > a)) throw DomainError("PiecewiseChebyshev: empty interval");
  if (degree < 2 || degree > kMaxCachedDegree) throw DomainError("PiecewiseChebyshev: degree must be in [2, 64]");

  PiecewiseChebyshev table;
  table.degree_ = degree;

  struct Panel {
    double lo;
    double hi;
  };
  const auto seeds = panel_edges(a, b, initial_edges);
  std::vector<Panel> pending;
  for (std::size_t i = seeds.size() - 1; i > 0; --i) pending.push_back({seeds[i - 1], seeds[i]});

  // Depth-first from the left so accepted panels come out in order.
  std::vector<Panel> accepted;
  std::vector<std::vector<double>> accepted_values;
  while (!pending.empty()) {
    const Panel p = pending.back();
    pending.pop_back();
    const auto nodes = lobatto_nodes(p.lo, p.hi, degree);
    std::vector<double> vals(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) vals[j] = f(nodes[j]);

    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
      const double xm = 0.5 * (nodes[j] + nodes[j + 1]);
      worst = std::max(worst, std::abs(lobatto_interpolate(vals, p.lo, p.hi, xm) - f(xm)));
    }
    const bool too_many = static_cast<int>(accepted.size() + pending.size()) >= max_panels;
    const double mid = 0.5 * (p.lo + p.hi);
    if (worst <= abs_tol || too_many || !(mid > p.lo && mid < p.hi)) {
      if (worst > abs_tol) table.converged_ = false;
      accepted.push_back(p);
      accepted_values.push_back(std::move(vals));
    } else {
      pending.push_back({mid, p.hi});
      pending.push_back({p.lo, mid});
    }
  }

  table.edges_.reserve(accepted.size() + 1);
  table.edges_.push_back(accepted.front().lo);
  for (const auto& p : accepted) table.edges_.push_back(p.hi);
  table.values_.reserve(accepted.size() * (degree + 1));
  for (const auto& v : accepted_values) table.values_.insert(table.values_.end(), v.begin(), v.end());
  return table;
}

double PiecewiseChebyshev::operator()(double x) const noexcept {
  const std::size_t stride = degree_ + 1;
  if (x <= edges_.front()) return values_[degree_];  // node order runs from b down to a
  if (x >= edges_.back()) return values_[values_.size() - stride];
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return lobatto_interpolate(std::span<const double>(values_).subspan(k * stride, stride), edges_[k], edges_[k + 1],
                             x);
}

}  // namespace sdestab
