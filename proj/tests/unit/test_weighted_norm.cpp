#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sdestab/coeffs.hpp"
#include "sdestab/errors.hpp"
#include "sdestab/mollify.hpp"
#include "sdestab/rng.hpp"
#include "sdestab/weighted_norm.hpp"

using namespace sdestab;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

// int_{x0-a}^{x0+a} exp(-(x-x0)^2 / (16 lambda T)) dx
double indicator_oracle(double a, double lambda, double T) {
  const double s = std::sqrt(16.0 * lambda * T);
  return s * kSqrtPi * std::erf(a / s);
}

}  // namespace

TEST(WeightedNorm, UnitFunctionMass) {
  const WeightedMeasure m(0.0, 1.0, 1.0);
  EXPECT_NEAR(weighted_lp_norm([](double) { return 1.0; }, 1.0, m), 4.0 * kSqrtPi, 1e-10);
  EXPECT_NEAR(4.0 * kSqrtPi, 7.0898, 5e-5);
  EXPECT_NEAR(m.total_mass(), 4.0 * kSqrtPi, 1e-14);
}

TEST(WeightedNorm, ZeroFunction) {
  EXPECT_EQ(weighted_lp_norm([](double) { return 0.0; }, 2.0, {}), 0.0);
}

TEST(WeightedNorm, IndicatorErfForm) {
  const double x0 = 0.3, lambda = 2.0, T = 0.5, a = 1.7;
  const WeightedMeasure m(x0, lambda, T);
  const std::vector<double> breaks{x0 - a, x0 + a};
  const auto f = [&](double x) { return std::abs(x - x0) <= a ? 1.0 : 0.0; };
  EXPECT_NEAR(weighted_lp_norm(f, 1.0, m, {}, breaks), indicator_oracle(a, lambda, T), 1e-10);
}

TEST(WeightedNorm, PBelowOneThrows) {
  EXPECT_THROW(weighted_lp_norm([](double) { return 1.0; }, 0.5, {}), DomainError);
}

TEST(EpsilonP, IdenticalPairIsZero) {
  const CoefficientPair c{builtin::neg_sign(), builtin::holder_diffusion(1.0, 0.5, 0.75)};
  const auto e = epsilon_p(SdePair::identical(0.0, 1.0, c), 1.0);
  EXPECT_EQ(e.epsilon, 0.0);
}

TEST(EpsilonP, ConstantDiffusionGap) {
  const double c = 0.3;
  const SdePair pair{0.0, 1.0, {builtin::neg_sign(), builtin::constant(1.0)},
                     {builtin::neg_sign(), builtin::constant(1.0 + c)}};
  const WeightedMeasure m(0.0, 1.0, 1.0);
  const auto e = epsilon_p(pair, 1.0, m);
  EXPECT_EQ(e.drift_term, 0.0);
  EXPECT_NEAR(e.diffusion_term, c * c * 4.0 * kSqrtPi, 1e-10);
  EXPECT_NEAR(e.epsilon, c * c * 4.0 * kSqrtPi, 1e-10);
}

TEST(EpsilonP, IndicatorDriftGap) {
  // b - b^ = 1 on (-a, a]: b = 1_{(-inf, a]}, b^ = 1_{(-inf, -a]}.
  const double a = 0.25;
  const SdePair pair{0.0, 1.0, {builtin::step(a, 1.0, 0.0), builtin::constant(1.0)},
                     {builtin::step(-a, 1.0, 0.0), builtin::constant(1.0)}};
  const WeightedMeasure m(0.0, 1.0, 1.0);
  const auto e = epsilon_p(pair, 1.0, m);
  EXPECT_NEAR(e.drift_term, indicator_oracle(a, 1.0, 1.0), 1e-10);
  EXPECT_EQ(e.diffusion_term, 0.0);
  EXPECT_TRUE(e.below_one);
}

// Properties.

TEST(Property, Homogeneity) {
  const auto f = [](double x) { return std::sin(x) + 0.5 * (x > 0.2 ? 1.0 : -1.0); };
  const std::vector<double> breaks{0.2};
  const WeightedMeasure m(0.1, 1.5, 0.7);
  for (double p : {1.0, 1.5, 2.0, 4.0}) {
    const double base = weighted_lp_norm(f, p, m, {}, breaks);
    for (double c : {-3.0, 0.25, 7.0}) {
      const double scaled = weighted_lp_norm([&](double x) { return c * f(x); }, p, m, {}, breaks);
      EXPECT_NEAR(scaled, std::abs(c) * base, 1e-10 * std::abs(c) * base);
    }
  }
}

TEST(Property, MonotoneInLambdaAndHorizon) {
  const auto f = [](double x) { return std::abs(x) > 1.0 ? 1.0 : 0.2; };
  const std::vector<double> breaks{-1.0, 1.0};
  double prev = 0.0;
  for (double lambda : {1.0, 1.5, 2.0, 4.0}) {
    const double v = weighted_lp_norm(f, 2.0, WeightedMeasure(0.0, lambda, 1.0), {}, breaks);
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = 0.0;
  for (double T : {0.1, 0.5, 1.0, 3.0}) {
    const double v = weighted_lp_norm(f, 2.0, WeightedMeasure(0.0, 1.0, T), {}, breaks);
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(Property, TriangleInequalityOnRandomSteps) {
  PhiloxStream rng(11, 0);
  const WeightedMeasure m(0.0, 1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> breaks;
    std::vector<double> vf, vg;
    for (int i = 0; i < 6; ++i) breaks.push_back(rng.uniform(-6.0, 6.0));
    std::sort(breaks.begin(), breaks.end());
    for (int i = 0; i < 7; ++i) {
      vf.push_back(rng.uniform(-2.0, 2.0));
      vg.push_back(rng.uniform(-2.0, 2.0));
    }
    const auto piece = [&](const std::vector<double>& v, double x) {
      std::size_t k = 0;
      while (k < breaks.size() && x > breaks[k]) ++k;
      return v[k];
    };
    const auto f = [&](double x) { return piece(vf, x); };
    const auto g = [&](double x) { return piece(vg, x); };
    const auto fg = [&](double x) { return f(x) + g(x); };
    for (double p : {1.0, 2.0, 3.0}) {
      const double lhs = weighted_lp_norm(fg, p, m, {}, breaks);
      const double rhs = weighted_lp_norm(f, p, m, {}, breaks) + weighted_lp_norm(g, p, m, {}, breaks);
      EXPECT_LE(lhs, rhs * (1.0 + 1e-10));
    }
  }
}

TEST(Property, TruncationRadiusDoublingStable) {
  const Coefficient b = builtin::neg_sign();
  const Coefficient s = builtin::holder_diffusion(1.0, 0.5, 0.75);
  const std::pair<Coefficient, Coefficient> gaps[] = {
      {b, mollify(b, 4)}, {s, mollify(s, 4)}, {b, builtin::step(0.5, 1.0, -1.0)}, {builtin::constant(1.0), s}};
  const WeightedMeasure m(0.0, 2.25, 1.0);
  NormSpec wide;
  wide.truncation_radius = 20.0;
  for (const auto& [c, d] : gaps) {
    std::vector<double> breaks(c.breakpoints());
    breaks.insert(breaks.end(), d.breakpoints().begin(), d.breakpoints().end());
    const auto diff = [&](double x) { return c(x) - d(x); };
    const double r10 = weighted_lp_integral(diff, 1.0, m, {}, breaks);
    const double r20 = weighted_lp_integral(diff, 1.0, m, wide, breaks);
    EXPECT_NEAR(r10, r20, 1e-8 * std::abs(r20)) << c.name() << " vs " << d.name();
  }
}

TEST(TruncationTail, MatchesErfcFormula) {
  const WeightedMeasure m(0.0, 1.0, 1.0);
  const double v = 8.0;
  EXPECT_NEAR(truncation_tail_bound(1.0, m, 10.0), std::sqrt(2.0 * std::numbers::pi * v) * std::erfc(10.0 / std::sqrt(2.0)),
              1e-30);
}
