#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "stabidx/random.hpp"

using namespace stabidx;

TEST(Xoshiro, MatchesReferenceStepFunction) {
  Xoshiro256pp g(std::array<std::uint64_t, 4>{1, 2, 3, 4});
  std::uint64_t ref[4] = {1, 2, 3, 4};
  EXPECT_EQ(g(), 41943041u);
  oracle::xoshiro_next(ref);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(g(), oracle::xoshiro_next(ref));
}

TEST(Xoshiro, SeedingIsDeterministic) {
  Xoshiro256pp a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(Substream, DistinctIdsGiveDistinctStreams) {
  auto s0 = substream(7, 0);
  auto s1 = substream(7, 1);
  auto s1b = substream(7, 1);
  EXPECT_EQ(s0, Xoshiro256pp(7));
  EXPECT_EQ(s1, s1b);
  EXPECT_NE(s0(), s1());
}

TEST(Substream, JumpIsLinearInState) {
  // jump() is a GF(2)-linear map of the state, so J(a ^ b) == J(a) ^ J(b).
  const std::array<std::uint64_t, 4> a{0x1234, 0x9abc, 0x5555, 0xdead}, b{0xffff0000, 0x1, 0x77, 0x42};
  std::array<std::uint64_t, 4> ab{};
  for (int i = 0; i < 4; ++i) ab[i] = a[i] ^ b[i];
  Xoshiro256pp ga(a), gb(b), gab(ab);
  ga.jump();
  gb.jump();
  gab.jump();
  for (int i = 0; i < 4; ++i) EXPECT_EQ(gab.state()[i], ga.state()[i] ^ gb.state()[i]);
}

TEST(UniformOpen0, NeverZeroAndAtMostOne) {
  EXPECT_GT(uniform_open0(0), 0.0);
  EXPECT_EQ(uniform_open0(~std::uint64_t{0}), 1.0);
}

TEST(Ziggurat, MomentsAndTails) {
  NormalStream<> normal(Xoshiro256pp(2024));
  const int n = 2'000'000;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  int beyond3 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = normal();
    s1 += x;
    s2 += x * x;
    s3 += x * x * x;
    s4 += x * x * x * x;
    if (std::abs(x) > 3.0) ++beyond3;
  }
  const double m1 = s1 / n, m2 = s2 / n, m3 = s3 / n, m4 = s4 / n;
  EXPECT_NEAR(m1, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 4.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m3, 0.0, 4.0 * std::sqrt(15.0 / n));
  EXPECT_NEAR(m4, 3.0, 4.0 * std::sqrt(96.0 / n));
  const double p3 = 2.0 * oracle::phi(-3.0);
  EXPECT_NEAR(static_cast<double>(beyond3) / n, p3, 4.0 * std::sqrt(p3 / n));
}

TEST(Ziggurat, KolmogorovSmirnov) {
  NormalStream<> normal(Xoshiro256pp(77));
  std::vector<double> xs(200'000);
  for (double& x : xs) x = normal();
  // 1% critical value is about 1.63 / sqrt(n).
  EXPECT_LT(oracle::ks_statistic(xs), 1.63 / std::sqrt(static_cast<double>(xs.size())));
}

TEST(Ziggurat, TailSamplesExceedBase) {
  NormalStream<> normal(Xoshiro256pp(5));
  double largest = 0.0;
  for (int i = 0; i < 2'000'000; ++i) largest = std::max(largest, std::abs(normal()));
  EXPECT_GT(largest, detail::ZigguratTables::kR);
}
