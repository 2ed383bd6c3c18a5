#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sdestab {

struct QuadratureSpec {
  /// Relative tolerance with respect to the L1 norm of the integrand, per breakpoint panel.
  double rel_tol = 1e-10;
  unsigned max_depth = 18;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

/// Globally adaptive Gauss-Kronrod (G30/K61) on [a, b], split at every breakpoint that
/// falls strictly inside the interval. Integrands with jumps or kinks at known
/// locations converge at the smooth-integrand rate once those points are panel edges.
QuadResult integrate(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec = {},
                     std::span<const double> breakpoints = {});

/// Sorted, de-duplicated breakpoints restricted to the open interval (a, b), with a and b prepended/appended.
std::vector<double> panel_edges(double a, double b, std::span<const double> breakpoints);

}  // namespace sdestab
