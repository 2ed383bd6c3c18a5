#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sdestab/rng.hpp"

using namespace sdestab;

// Known-answer vectors from the Random123 distribution (philox4x32_10).
TEST(Philox, KnownAnswerZero) {
  const auto r = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r[0], 0x6627e8d5u);
  EXPECT_EQ(r[1], 0xe169c58du);
  EXPECT_EQ(r[2], 0xbc57ac4cu);
  EXPECT_EQ(r[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
  const auto r = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(r[0], 0x408f276du);
  EXPECT_EQ(r[1], 0x41c83b0eu);
  EXPECT_EQ(r[2], 0xa20bc7c6u);
  EXPECT_EQ(r[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto r = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(r[0], 0xd16cfe09u);
  EXPECT_EQ(r[1], 0x94fdcceb);
  EXPECT_EQ(r[2], 0x5001e420u);
  EXPECT_EQ(r[3], 0x24126ea1u);
}

TEST(CounterNormals, ReproducibleInIsolation) {
  const CounterNormals a(42);
  const CounterNormals b(42);
  EXPECT_EQ(a.at(7, 1001), b.at(7, 1001));
  EXPECT_NE(a.at(7, 1001), a.at(8, 1001));
  EXPECT_NE(a.at(7, 1001), CounterNormals(43).at(7, 1001));
}

TEST(CounterNormals, MomentsOfStandardNormal) {
  const CounterNormals z(3);
  const std::size_t n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  double s4 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = z.at(0, i);
    s += v;
    s2 += v * v;
    s4 += v * v * v * v;
  }
  EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(double(n)));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(PhiloxStream, UniformInUnitInterval) {
  PhiloxStream rng(9, 1);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LE(u, 1.0);
    mean += u;
  }
  EXPECT_NEAR(mean / 1e5, 0.5, 0.005);
}

TEST(MixSeed, DistinctSalts) {
  EXPECT_NE(mix_seed(1, 2), mix_seed(1, 4));
  EXPECT_NE(mix_seed(1, 2), mix_seed(2, 2));
  EXPECT_EQ(mix_seed(5, 8), mix_seed(5, 8));
}
