#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stabidx/montecarlo.hpp"

using namespace stabidx;

namespace {

EstimationConfig config(ModelFamily f, std::uint64_t samples, std::uint32_t shards = 16, std::uint64_t seed = kDefaultSeed) {
  EstimationConfig c;
  c.family = f;
  c.samples = samples;
  c.shards = shards;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(Config, Validation) {
  auto c = config(ModelFamily::continuous_system(2), 10, 16);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.shards = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = config(ModelFamily::continuous_system(2), 100);
  c.tol = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Estimation, ShardSizesCoverSamples) {
  std::uint64_t total = 0;
  for (std::uint32_t s = 0; s < 7; ++s) total += shard_size(1000, 7, s);
  EXPECT_EQ(total, 1000u);
}

TEST(Estimation, ContinuousEquationOrderOne) {
  const auto h = run_estimation(config(ModelFamily::continuous_equation(1), 1'000'000));
  EXPECT_EQ(h.total, 1'000'000u);
  const auto p = frequencies(h);
  EXPECT_NEAR(p.values[0], 0.5, 2e-3);
  EXPECT_NEAR(p.values[1], 0.5, 2e-3);
}

TEST(Estimation, ContinuousSystemOrderTwo) {
  const auto p = frequencies(run_estimation(config(ModelFamily::continuous_system(2), 1'000'000)));
  EXPECT_NEAR(p.values[0], 0.25, 3e-3);
  EXPECT_NEAR(p.values[1], 0.5, 3e-3);
  EXPECT_NEAR(p.values[2], 0.25, 3e-3);
}

TEST(Estimation, DifferenceEquationOrderTwoAtTenThousand) {
  const auto p = frequencies(run_estimation(config(ModelFamily::discrete_equation(2), 10'000)));
  EXPECT_NEAR(p.values[2], 0.3041, 0.02);
}

TEST(Estimation, DeterministicForEqualSeedAndShards) {
  for (auto f : {ModelFamily::continuous_system(3), ModelFamily::discrete_system(3)}) {
    auto c = config(f, 20'000);
    EXPECT_EQ(run_estimation(c), run_estimation(c));
  }
}

TEST(Estimation, WorkerCountDoesNotChangeResult) {
  auto c = config(ModelFamily::continuous_equation(5), 50'000, 12);
  c.workers = 1;
  const auto a = run_estimation(c);
  c.workers = 5;
  EXPECT_EQ(a, run_estimation(c));
}

TEST(Estimation, ShardedEqualsMergeOfIndividualShards) {
  const auto c = config(ModelFamily::discrete_equation(4), 30'000, 6);
  auto merged = IndexHistogram::empty(c.family);
  for (std::uint32_t s = 0; s < c.shards; ++s) merged = merge(merged, run_shard(c, s));
  EXPECT_EQ(merged, run_estimation(c));
}

TEST(Estimation, SingleShardUsesTheSeedStream) {
  const auto c = config(ModelFamily::continuous_equation(3), 5'000, 1);
  NormalStream<> normal(Xoshiro256pp(c.seed));
  auto h = IndexHistogram::empty(c.family);
  for (int i = 0; i < 5'000; ++i) h.record(sample_index(c.family, c.method, normal).index);
  EXPECT_EQ(h, run_estimation(c));
}

TEST(Estimation, AbortsWhenTooManyIndeterminate) {
  auto c = config(ModelFamily::discrete_equation(3), 20'000);
  c.tol = 0.2;
  try {
    (void)run_estimation(c);
    FAIL() << "expected EstimationAborted";
  } catch (const EstimationAborted& e) {
    EXPECT_GT(e.histogram().indeterminate_fraction(), kMaxIndeterminateFraction);
    EXPECT_EQ(e.histogram().total, 20'000u);
  }
}

TEST(Histogram, MergeIsCommutativeAndChecksFamily) {
  const auto c = config(ModelFamily::continuous_equation(2), 2'000, 2);
  const auto a = run_shard(c, 0), b = run_shard(c, 1);
  EXPECT_EQ(merge(a, b), merge(b, a));
  EXPECT_THROW(merge(a, IndexHistogram::empty(ModelFamily::continuous_equation(3))), std::invalid_argument);
  EXPECT_THROW(merge(a, IndexHistogram::empty(ModelFamily::discrete_equation(2))), std::invalid_argument);
}

TEST(Frequencies, WorkedExamples) {
  auto h = IndexHistogram::empty(ModelFamily::continuous_equation(1));
  h.counts = {5, 5};
  h.total = 10;
  auto p = frequencies(h);
  EXPECT_EQ(p.values, (std::vector<double>{0.5, 0.5}));
  EXPECT_NEAR(p.std_error[0], std::sqrt(0.025), 1e-15);
  EXPECT_NEAR(p.std_error[0], 0.158, 1e-3);
  h.counts = {0, 10};
  p = frequencies(h);
  EXPECT_EQ(p.values, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(p.std_error, (std::vector<double>{0.0, 0.0}));
}

TEST(Frequencies, ExcludesIndeterminateAndRejectsEmpty) {
  auto h = IndexHistogram::empty(ModelFamily::continuous_equation(1));
  h.counts = {3, 1};
  h.indeterminate = 4;
  h.total = 8;
  EXPECT_EQ(frequencies(h).values, (std::vector<double>{0.75, 0.25}));
  h.counts = {0, 0};
  h.total = 4;
  EXPECT_THROW(frequencies(h), std::domain_error);
}

TEST(LogLogFit, ReproducesPublishedRegression) {
  // Observed errors of p2 for order-two difference equations at M = 10^2..10^10.
  const std::vector<double> err{0.065913276015, 0.014913276015, 0.006113276015, 0.000073276015, 0.000194723985,
                                0.000037376015, 0.000025933985, 0.000010024985, 0.000007625985};
  std::vector<double> m;
  for (int e = 2; e <= 10; ++e) m.push_back(std::pow(10.0, e));
  const auto fit = fit_log_log(m, err);
  ASSERT_TRUE(fit);
  EXPECT_NEAR(fit->slope, -0.505, 5e-4);
  EXPECT_NEAR(fit->intercept, -1.260, 5e-4);
  EXPECT_NEAR(fit->r_squared, 0.893, 5e-4);
}

TEST(LogLogFit, AbsentWithFewerThanTwoPoints) {
  EXPECT_FALSE(fit_log_log({100.0}, {0.1}));
  EXPECT_FALSE(fit_log_log({100.0, 1000.0}, {0.1, 0.0}));
  const auto exact = fit_log_log({1.0, 10.0, 100.0}, {1.0, 0.1, 0.01});
  ASSERT_TRUE(exact);
  EXPECT_NEAR(exact->slope, -1.0, 1e-12);
  EXPECT_NEAR(exact->r_squared, 1.0, 1e-12);
}

TEST(Convergence, OnePointGridHasNoSlope) {
  const double exact = std::atan(std::sqrt(2.0)) / std::numbers::pi;
  const auto t = convergence_study(ModelFamily::discrete_equation(2), 2, exact, {1000}, 1);
  EXPECT_EQ(t.rows.size(), 1u);
  EXPECT_FALSE(t.fit);
}

TEST(Convergence, ShortGridStillReportsSlope) {
  const double exact = std::atan(std::sqrt(2.0)) / std::numbers::pi;
  const auto t = convergence_study(ModelFamily::discrete_equation(2), 2, exact, {100, 1000, 10000}, kDefaultSeed);
  ASSERT_TRUE(t.fit);
  EXPECT_TRUE(std::isfinite(t.fit->slope));
}

TEST(Convergence, ErrorAtOneMillionWithinEnvelope) {
  const double exact = std::atan(std::sqrt(2.0)) / std::numbers::pi;
  const auto t = convergence_study(ModelFamily::discrete_equation(2), 2, exact,
                                   {100, 1000, 10000, 100000, 1000000}, kDefaultSeed);
  EXPECT_LT(t.rows.back().abs_error, 1e-2);
  EXPECT_LT(t.rows.back().abs_error, 4.0 * std::sqrt(exact * (1 - exact) / 1e6));
}

TEST(Convergence, MeanSlopeOverSeedsIsMinusOneHalf) {
  const double exact = std::atan(std::sqrt(2.0)) / std::numbers::pi;
  double sum = 0.0;
  const int seeds = 40;
  for (int s = 0; s < seeds; ++s) {
    const auto t = convergence_study(ModelFamily::discrete_equation(2), 2, exact, {100, 1000, 10000, 100000},
                                     1000 + static_cast<std::uint64_t>(s));
    ASSERT_TRUE(t.fit);
    sum += t.fit->slope;
  }
  // A single four-point slope has standard deviation near 0.2.
  EXPECT_NEAR(sum / seeds, -0.5, 4.0 * 0.2 / std::sqrt(seeds));
}
