#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "stabidx/models.hpp"
#include "stabidx/random.hpp"

using namespace stabidx;

TEST(ModelFamily, ParameterCounts) {
  EXPECT_EQ(ModelFamily::continuous_system(3).parameter_count(), 9);
  EXPECT_EQ(ModelFamily::continuous_equation(3).parameter_count(), 4);
  EXPECT_EQ(ModelFamily::discrete_system(3).parameter_count(), 10);
  EXPECT_EQ(ModelFamily::discrete_equation(3).parameter_count(), 4);
  EXPECT_THROW(ModelFamily::continuous_system(0), std::invalid_argument);
}

TEST(ModelFamily, NamesRoundTrip) {
  using K = ModelFamily::Kind;
  for (K k : {K::continuous_system, K::continuous_equation, K::discrete_system, K::discrete_equation})
    EXPECT_EQ(parse_family_kind(to_string(k)), k);
  EXPECT_FALSE(parse_family_kind("cont"));
  EXPECT_EQ(parse_index_method("rh"), IndexMethod::char_poly_routh_hurwitz);
  EXPECT_FALSE(parse_index_method("jury"));
}

TEST(CharPoly, WorkedExamples) {
  Eigen::MatrixXd s(2, 2);
  s << 0, 1, 1, 0;
  EXPECT_EQ(char_poly(s).coeffs(), (std::vector<double>{-1, 0, 1}));
  const auto id = char_poly(Eigen::MatrixXd::Identity(3, 3)).coeffs();
  const std::vector<double> expected{-1, 3, -3, 1};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(id[i], expected[i], 1e-14);
}

TEST(CharPoly, MatchesCofactorExpansion) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> nd;
  for (int n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
      const auto got = char_poly(a).coeffs();
      const auto ref = oracle::laplace_char_poly(a);
      ASSERT_EQ(got.size(), ref.size());
      double scale = 0.0;
      for (double v : ref) scale = std::max(scale, std::abs(v));
      for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(got[k], ref[k], 1e-10 * scale);
    }
  }
}

TEST(IndexOfParameters, WorkedExamples) {
  const double ce[] = {1, 1};
  EXPECT_EQ(index_of_parameters(ModelFamily::continuous_equation(1), IndexMethod::automatic, ce).index.value(), 1);
  const double ds[] = {2, 1};
  EXPECT_EQ(index_of_parameters(ModelFamily::discrete_system(1), IndexMethod::automatic, ds).index.value(), 1);
  EXPECT_EQ(index_of_parameters(ModelFamily::discrete_system(1), IndexMethod::char_poly_routh_hurwitz, ds).index.value(), 1);
  const double de[] = {1, 0, -0.25};
  EXPECT_EQ(index_of_parameters(ModelFamily::discrete_equation(2), IndexMethod::automatic, de).index.value(), 2);
  const double cs[] = {-1, 0, 0, 2};
  EXPECT_EQ(index_of_parameters(ModelFamily::continuous_system(2), IndexMethod::automatic, cs).index.value(), 1);
}

TEST(IndexOfParameters, RejectsWrongLength) {
  const double p[] = {1, 2, 3};
  EXPECT_THROW(index_of_parameters(ModelFamily::continuous_system(2), IndexMethod::automatic, p), std::invalid_argument);
}

TEST(IndexOfParameters, MethodsAgreeOnRandomSamples) {
  using K = ModelFamily::Kind;
  NormalStream<> normal(Xoshiro256pp(31));
  for (K kind : {K::continuous_system, K::continuous_equation, K::discrete_system, K::discrete_equation}) {
    for (int n = 1; n <= 6; ++n) {
      const ModelFamily f(kind, n);
      std::vector<double> params(static_cast<std::size_t>(f.parameter_count()));
      for (int rep = 0; rep < 300; ++rep) {
        for (double& v : params) v = normal();
        const auto a = index_of_parameters(f, IndexMethod::char_poly_routh_hurwitz, params).index;
        const auto b = index_of_parameters(f, IndexMethod::direct_eigen, params).index;
        if (a && b) EXPECT_EQ(a.value(), b.value()) << to_string(kind) << " n=" << n;
      }
    }
  }
}

TEST(IndexOfParameters, NegatingASystemComplementsTheIndex) {
  NormalStream<> normal(Xoshiro256pp(32));
  const auto f = ModelFamily::continuous_system(4);
  std::vector<double> params(16), neg(16);
  for (int rep = 0; rep < 500; ++rep) {
    for (std::size_t i = 0; i < 16; ++i) {
      params[i] = normal();
      neg[i] = -params[i];
    }
    const auto a = index_of_parameters(f, IndexMethod::automatic, params).index;
    const auto b = index_of_parameters(f, IndexMethod::automatic, neg).index;
    if (a && b) EXPECT_EQ(a.value() + b.value(), 4);
  }
}

TEST(SampleIndex, ConsumesExactlyParameterCountVariates) {
  const auto f = ModelFamily::discrete_system(3);
  int calls = 0;
  auto counting = [&calls]() {
    ++calls;
    return 0.5 + 0.1 * calls;
  };
  (void)sample_index(f, IndexMethod::automatic, counting);
  EXPECT_EQ(calls, f.parameter_count());
}
