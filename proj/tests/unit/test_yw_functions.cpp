#include <gtest/gtest.h>

#include <cmath>

#include "sdestab/coeffs.hpp"
#include "sdestab/errors.hpp"
#include "sdestab/rng.hpp"
#include "sdestab/yw_functions.hpp"

using namespace sdestab;

namespace {

// Midpoint rule on the support, in log space so small kappa does not underflow.
double log_inverse_mu_oracle(double delta, double kappa, std::size_t n = 400000) {
  const double lo = kappa / delta;
  const double h = (kappa - lo) / n;
  const double mid = 0.5 * (lo + kappa);
  const double gmin = -1.0 / ((kappa - mid) * (mid - lo));
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = lo + (i + 0.5) * h;
    s += std::exp(-1.0 / ((kappa - z) * (z - lo)) - gmin);
  }
  return std::log(s * h) + gmin;
}

}  // namespace

TEST(Psi, VanishesAtSupportEnds) {
  const YwParams p(4.0, 0.5);
  EXPECT_EQ(psi(0.5, p), 0.0);
  EXPECT_EQ(psi(0.5 / 4.0, p), 0.0);
  EXPECT_EQ(psi(0.0, p), 0.0);
  EXPECT_EQ(psi(1.0, p), 0.0);
}

TEST(Psi, MidpointMatchesQuadratureOracle) {
  for (auto [delta, kappa] : {std::pair{4.0, 0.5}, std::pair{2.0, 0.9}, std::pair{10.0, 0.7}}) {
    const YwParams p(delta, kappa);
    const double lo = kappa / delta;
    const double mid = 0.5 * (kappa + lo);
    const double log_mu = -log_inverse_mu_oracle(delta, kappa);
    EXPECT_NEAR(p.log_mu(), log_mu, 1e-9 * std::abs(log_mu));
    const double expected = std::exp(log_mu - 4.0 / ((kappa - lo) * (kappa - lo)));
    EXPECT_NEAR(psi(mid, p), expected, 1e-9 * expected);
  }
}

TEST(PhiPrime, Examples) {
  const YwParams p(4.0, 0.5);
  EXPECT_EQ(phi_prime(0.0, p), 0.0);
  EXPECT_NEAR(phi_prime(0.5, p), 1.0, 1e-12);
  EXPECT_NEAR(phi_prime(-1.0, p), -1.0, 1e-12);
}

TEST(Phi, Examples) {
  const YwParams p(4.0, 0.5);
  EXPECT_EQ(phi(0.0, p), 0.0);
  EXPECT_EQ(phi(0.5 / 4.0, p), 0.0);
  const double c = c_delta_kappa(p);
  EXPECT_GE(c, 0.5 / 4.0);
  EXPECT_LE(c, 0.5);
  for (double x : {0.5, 0.8, -2.0}) EXPECT_NEAR(phi(x, p), std::abs(x) - c, 1e-12);
}

TEST(Phi, AgreesWithNumericDoubleIntegral) {
  const YwParams p(3.0, 0.6);
  const double x = 0.45;
  // phi(x) = int_0^x (x - z) psi(z) dz.
  const double lo = p.support_lo();
  const std::size_t n = 200000;
  const double h = (x - lo) / n;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = lo + (i + 0.5) * h;
    s += (x - z) * psi(z, p);
  }
  EXPECT_NEAR(phi(x, p), s * h, 1e-9);
}

TEST(PhiDoublePrime, Examples) {
  const double kappa = 0.6;
  const YwParams p(4.0, kappa);
  EXPECT_LE(phi_double_prime(kappa / 2.0, p), 2.0 / ((kappa / 2.0) * std::log(4.0)));
  EXPECT_EQ(phi_double_prime(2.0 * kappa, p), 0.0);
  EXPECT_EQ(phi_double_prime(-kappa / 8.0, p), 0.0);
  EXPECT_THROW(phi_double_prime(0.0, p), DomainError);
}

TEST(YwParams, InvalidArgumentsThrow) {
  EXPECT_THROW(YwParams(1.0, 0.5), DomainError);
  EXPECT_THROW(YwParams(2.0, 0.0), DomainError);
  EXPECT_THROW(YwParams(2.0, 1.0), DomainError);
}

TEST(YwParams, TinySupportKeepsFiniteLogMu) {
  const YwParams p(1.5, 0.05);
  EXPECT_TRUE(std::isfinite(p.log_mu()));
  EXPECT_NEAR(p.mass(), 1.0, 1e-9);
  EXPECT_NEAR(phi_prime(0.05, p), 1.0, 1e-9);
}

// Properties on random (delta, kappa).

TEST(Property, Properties2To4OnRandomParameters) {
  PhiloxStream rng(2024, 1);
  for (int i = 0; i < 20; ++i) {
    const double delta = rng.uniform(1.5, 20.0);
    const double kappa = rng.uniform(0.05, 0.95);
    const YwParams p(delta, kappa);
    const auto r = check_yw_properties(p, 10000);
    EXPECT_TRUE(r.mass_ok(1e-9)) << delta << " " << kappa;
    EXPECT_TRUE(r.prop2_ok(1e-9)) << delta << " " << kappa;
    EXPECT_TRUE(r.prop3_ok(1e-9)) << delta << " " << kappa;
    EXPECT_TRUE(r.prop4_ok(1e-9)) << delta << " " << kappa;
  }
}

TEST(Property, PhiPrimeZeroInsideAndPositiveRatioOutside) {
  const YwParams p(5.0, 0.4);
  for (double x = -1.2; x <= 1.2; x += 0.001) {
    if (x == 0.0) continue;
    if (std::abs(x) <= p.support_lo()) {
      EXPECT_EQ(phi_prime(x, p), 0.0) << x;
    } else {
      EXPECT_GE(phi_prime(x, p) / x, 0.0) << x;
    }
  }
  EXPECT_GT(phi_prime(0.5 * (p.support_lo() + p.support_hi()), p), 0.0);
}

TEST(Property, OneSidedLipschitzComposition) {
  const YwParams p(4.0, 0.3);
  const Coefficient drifts[] = {builtin::neg_sign(), builtin::clipped_linear(2.0, 1.0), builtin::step(0.4, 1.0, -2.0)};
  PhiloxStream rng(5, 9);
  for (const auto& b : drifts) {
    const double L = *b.regularity().osl;
    for (int i = 0; i < 100000; ++i) {
      const double x = rng.uniform(-2.0, 2.0);
      const double y = x + (rng.uniform() < 0.5 ? 1.0 : -1.0) * std::exp(rng.uniform(-12.0, 1.0));
      const double lhs = phi_prime(x - y, p) * (b(x) - b(y));
      ASSERT_LE(lhs, L * std::abs(x - y) + 1e-9) << b.name() << " x=" << x << " y=" << y;
    }
  }
}

// The kernel as defined violates psi(|x|) <= 2/(|x| log delta) near the upper
// end of its support; the report exposes the margin.
TEST(Property5, ReportedExcessIsPositiveForDefinedKernel) {
  const YwParams p(4.0, 0.5);
  const auto r = check_yw_properties(p);
  EXPECT_GT(r.prop5_max_ratio, 1.0);
  EXPECT_FALSE(r.prop5_ok(1e-9));
  EXPECT_GE(std::abs(r.prop5_worst_x), p.support_lo());
  EXPECT_LE(std::abs(r.prop5_worst_x), p.support_hi());
}
