#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sdestab/chebyshev.hpp"
#include "sdestab/errors.hpp"
#include "sdestab/quadrature.hpp"

using namespace sdestab;

TEST(Integrate, Polynomial) {
  const auto r = integrate([](double x) { return x * x * x - 2.0 * x; }, -1.0, 2.0);
  EXPECT_NEAR(r.value, (16.0 / 4.0 - 4.0) - (1.0 / 4.0 - 1.0), 1e-13);
}

TEST(Integrate, GaussianMass) {
  const auto r = integrate([](double x) { return std::exp(-0.5 * x * x); }, -40.0, 40.0, {1e-13, 30});
  EXPECT_NEAR(r.value, std::sqrt(2.0 * std::numbers::pi), 1e-12);
}

TEST(Integrate, JumpAtBreakpoint) {
  const auto f = [](double x) { return x <= 0.3 ? 1.0 : -2.0; };
  const std::vector<double> breaks{0.3};
  const auto r = integrate(f, 0.0, 1.0, {}, breaks);
  EXPECT_NEAR(r.value, 0.3 - 2.0 * 0.7, 1e-14);
}

TEST(Integrate, SqrtSingularityConverges) {
  const auto r = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, {1e-12, 40});
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-11);
}

TEST(Integrate, ReversedBoundsFlipSign) {
  const auto f = [](double x) { return std::cos(x); };
  EXPECT_NEAR(integrate(f, 1.0, 0.0).value, -std::sin(1.0), 1e-14);
  EXPECT_EQ(integrate(f, 2.0, 2.0).value, 0.0);
}

TEST(Integrate, NonFiniteEndpointThrows) {
  EXPECT_THROW(integrate([](double) { return 1.0; }, 0.0, INFINITY), DomainError);
}

TEST(PanelEdges, SortsAndRestricts) {
  const std::vector<double> b{0.7, -3.0, 0.2, 0.7, 5.0};
  const auto e = panel_edges(0.0, 1.0, b);
  ASSERT_EQ(e.size(), 4u);
  EXPECT_EQ(e[0], 0.0);
  EXPECT_EQ(e[1], 0.2);
  EXPECT_EQ(e[2], 0.7);
  EXPECT_EQ(e[3], 1.0);
}

TEST(Chebyshev, InterpolatesSmoothFunction) {
  const auto f = [](double x) { return std::exp(std::sin(3.0 * x)); };
  const auto p = PiecewiseChebyshev::build(f, -2.0, 2.0, 16, 1e-12);
  EXPECT_TRUE(p.converged());
  for (double x = -2.0; x <= 2.0; x += 0.0137) EXPECT_NEAR(p(x), f(x), 1e-11);
}
