#include <gtest/gtest.h>

#include "sdestab/assumptions.hpp"
#include "sdestab/errors.hpp"
#include "sdestab/mollify.hpp"

using namespace sdestab;

namespace {

SamplingSpec quick() {
  SamplingSpec s;
  s.osl_pairs = 20000;
  s.holder_pairs = 20000;
  return s;
}

}  // namespace

TEST(CheckAssumptions, SignDriftAgainstMollified) {
  const CoefficientPair exact{builtin::neg_sign(), builtin::constant(1.0)};
  const SdePair pair{0.0, 1.0, exact, {mollify(exact.drift, 8), exact.diffusion}};
  const auto r = check_assumptions(pair, 1.0, quick());
  for (const char* name : {"A-(i)", "A-(ii)", "A-(iii)", "A-(iv)"}) EXPECT_TRUE(r.at(name).pass) << name;
  EXPECT_GT(r.epsilon.epsilon, 0.0);
  EXPECT_EQ(r.at("A-(p)").pass, r.epsilon.epsilon < 1.0);
  EXPECT_TRUE(r.all_pass());
}

TEST(CheckAssumptions, EllipticityViolationHasWitness) {
  // Declared lambda = 1 but sigma reaches 2 on [1, 2].
  Regularity reg;
  reg.bound = 2.0;
  reg.holder = HolderSpec{1.0, 1.0};
  reg.ellipticity = 1.0;
  const Coefficient sigma = analytic(
      "bumpy", [](double x) { return x >= 1.0 && x <= 2.0 ? 2.0 : 1.0; }, reg, {1.0, 2.0});
  const CoefficientPair c{builtin::neg_sign(), sigma};
  const auto r = check_assumptions(SdePair::identical(0.0, 1.0, c), 1.0, quick());
  const auto& iv = r.at("A-(iv)");
  EXPECT_FALSE(iv.pass);
  ASSERT_TRUE(iv.witness_x.has_value());
  EXPECT_GE(*iv.witness_x, 1.0);
  EXPECT_LE(*iv.witness_x, 2.0);
  EXPECT_FALSE(r.all_pass());
}

TEST(CheckAssumptions, IdenticalPairHasZeroEpsilon) {
  const CoefficientPair c{builtin::neg_sign(), builtin::holder_diffusion(1.0, 0.5, 0.75)};
  const auto r = check_assumptions(SdePair::identical(0.0, 1.0, c), 2.0, quick());
  EXPECT_EQ(r.epsilon.epsilon, 0.0);
  EXPECT_TRUE(r.at("A-(p)").pass);
}

TEST(CheckAssumptions, IncreasingJumpFailsOsl) {
  Regularity reg = builtin::neg_sign().regularity();
  const Coefficient up = analytic("up", [](double x) { return x > 0.0 ? 1.0 : -1.0; }, reg, {0.0});
  const CoefficientPair c{up, builtin::constant(1.0)};
  const auto r = check_assumptions(SdePair::identical(0.0, 1.0, c), 1.0, quick());
  EXPECT_FALSE(r.at("A-(i)").pass);
  EXPECT_TRUE(r.at("A-(i)").witness_x.has_value());
}

TEST(CheckAssumptions, MissingMetadataNamesField) {
  const Coefficient bare = analytic("bare", [](double) { return 0.0; }, {});
  const CoefficientPair c{bare, builtin::constant(1.0)};
  try {
    check_assumptions(SdePair::identical(0.0, 1.0, c), 1.0, quick());
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(e.path().find("drift"), std::string::npos) << e.path();
  }
}

TEST(AssumptionReport, UnknownNameThrows) {
  AssumptionReport r;
  EXPECT_THROW(r.at("A-(x)"), std::out_of_range);
}
