#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sdestab {

/// Chebyshev-Lobatto nodes x_j = mid + half*cos(pi j / degree), j = 0..degree, on [a, b].
std::vector<double> lobatto_nodes(double a, double b, int degree);

/// Barycentric interpolation through Lobatto node values on [a, b]. Exact at the nodes.
double lobatto_interpolate(std::span<const double> values, double a, double b, double x) noexcept;

/// Piecewise Chebyshev interpolant with adaptively bisected panels.
///
/// Panels are refined until the interpolant agrees with `f` at the midpoints
/// between consecutive nodes to within `abs_tol`. Panel endpoints are nodes, so
/// the interpolant is continuous.
class PiecewiseChebyshev {
 public:
  PiecewiseChebyshev() = default;

  static PiecewiseChebyshev build(const std::function<double(double)>& f, double a, double b, int degree,
                                  double abs_tol, std::span<const double> initial_edges = {}, int max_panels = 4096);

  /// Evaluates inside [a, b]; outside, clamps to the end values.
  double operator()(double x) const noexcept;

  double lower() const noexcept { return edges_.front(); }
  double upper() const noexcept { return edges_.back(); }
  std::size_t panels() const noexcept { return edges_.size() - 1; }
  bool converged() const noexcept { return converged_; }

 private:
  int degree_ = 0;
  std::vector<double> edges_;
  std::vector<double> values_;  // panels() * (degree_ + 1)
  bool converged_ = true;
};

}  // namespace sdestab
