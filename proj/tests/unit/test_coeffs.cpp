#include <gtest/gtest.h>

#include <cmath>

#include "sdestab/coeffs.hpp"
#include "sdestab/errors.hpp"
#include "sdestab/weighted_norm.hpp"

using namespace sdestab;

TEST(Eval, SignDriftBranches) {
  const Coefficient b = builtin::neg_sign();
  EXPECT_EQ(b(-1.0), 1.0);
  EXPECT_EQ(b(2.0), -1.0);
  EXPECT_EQ(b(0.0), 1.0);
}

TEST(Eval, ConstantDiffusion) { EXPECT_EQ(builtin::constant(1.0)(17.3), 1.0); }

TEST(Eval, NonFiniteArgumentThrows) {
  EXPECT_THROW(builtin::neg_sign()(NAN), DomainError);
  EXPECT_THROW(builtin::constant(1.0)(INFINITY), DomainError);
}

TEST(Eval, HolderDiffusionShape) {
  const Coefficient s = builtin::holder_diffusion(1.0, 0.5, 0.75, 2.0);
  EXPECT_DOUBLE_EQ(s(2.0), 1.0);
  EXPECT_DOUBLE_EQ(s(2.0 + 0.5), 1.0 + 0.5 * std::pow(0.5, 0.75));
  EXPECT_DOUBLE_EQ(s(10.0), 1.5);
}

TEST(ProbeOsl, DecreasingFunctionIsNonPositive) {
  const auto r = probe_one_sided_lipschitz(builtin::neg_sign(), {-5.0, 5.0}, 100000, 1);
  EXPECT_LE(r.estimate, 0.0);
  EXPECT_FALSE(r.appears_unbounded);
}

TEST(ProbeOsl, LinearExactRatio) {
  const Coefficient f = analytic("2x", [](double x) { return 2.0 * x; }, {});
  const auto r = probe_one_sided_lipschitz(f, {-1.0, 1.0}, 10000, 2);
  EXPECT_NEAR(r.estimate, 2.0, 1e-12);
}

TEST(ProbeOsl, IncreasingJumpIsNotInClass) {
  const auto r = probe_one_sided_lipschitz(builtin::pos_sign(), {-1.0, 1.0}, 100000, 3);
  EXPECT_TRUE(r.appears_unbounded);
  EXPECT_GT(r.estimate, 1e4);
}

TEST(ProbeOsl, EmptyDomainThrows) {
  EXPECT_THROW(probe_one_sided_lipschitz(builtin::neg_sign(), {1.0, 1.0}, 10, 1), DomainError);
}

// Property: declared one-sided constants are never exceeded.
TEST(Property, BuiltinOslWithinDeclared) {
  const Coefficient drifts[] = {builtin::neg_sign(), builtin::neg_sign(2.5), builtin::step(0.3, 1.0, -0.5),
                                builtin::clipped_linear(1.5, 2.0), builtin::clipped_linear(-1.0, 1.0),
                                builtin::constant(0.7)};
  for (const auto& b : drifts) {
    ASSERT_TRUE(b.regularity().osl.has_value()) << b.name();
    const auto r = probe_one_sided_lipschitz(b, {-10.0, 10.0}, 100000, 17);
    EXPECT_LE(r.estimate, *b.regularity().osl + 1e-12) << b.name();
  }
}

TEST(Property, BuiltinDiffusionEllipticityOnStandardGrid) {
  const Coefficient sigmas[] = {builtin::constant(1.0), builtin::constant(1.7), builtin::holder_diffusion(1.0, 0.5, 0.75),
                                builtin::holder_diffusion(0.5, 1.0, 0.5, 1.0)};
  for (const auto& s : sigmas) {
    const double lambda = *s.regularity().ellipticity;
    const WeightedMeasure m(0.0, lambda, 1.0);
    const double r = 10.0 * std::sqrt(m.variance());
    const auto range = probe_range(s, {-r, r}, 10000);
    EXPECT_GE(range.min_value * range.min_value, 1.0 / lambda - 1e-12) << s.name();
    EXPECT_LE(range.max_value * range.max_value, lambda + 1e-12) << s.name();
  }
}

TEST(Property, BuiltinDiffusionHolderWithinDeclared) {
  const Coefficient sigmas[] = {builtin::holder_diffusion(1.0, 0.5, 0.75), builtin::holder_diffusion(0.5, 1.0, 0.5, 1.0),
                                builtin::holder_diffusion(2.0, 0.3, 1.0)};
  for (const auto& s : sigmas) {
    const HolderSpec h = *s.regularity().holder;
    const auto r = probe_holder(s, h.eta, {-4.0, 4.0}, 100000, 5);
    EXPECT_LE(r.estimate, h.constant + 1e-9) << s.name();
    EXPECT_GT(r.estimate, 0.5 * h.constant) << s.name();
  }
}

TEST(SdePair, DerivedConstants) {
  const SdePair pair{0.0, 1.0, {builtin::neg_sign(), builtin::holder_diffusion(1.0, 0.5, 0.75)},
                     {builtin::neg_sign(), builtin::constant(1.0)}};
  EXPECT_DOUBLE_EQ(pair.eta(), 0.75);
  EXPECT_DOUBLE_EQ(pair.alpha(), 0.25);
  EXPECT_GE(pair.lambda(), 1.5 * 1.5);
  EXPECT_GE(pair.common_k(), 1.0);
}
