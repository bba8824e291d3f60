#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "orthomart/expansion.hpp"
#include "orthomart/oracle.hpp"
#include "zoo.hpp"

namespace om = orthomart;
using om::Expansion;
using om::MultiIndex;

TEST(Oracle, ExpectationExamples) {
  const std::vector<MultiIndex> one{{0, 0}};
  EXPECT_EQ(om::oracle::expectation(Expansion::site({0, 0}), one), 0.0);
  const std::vector<MultiIndex> two{{0, 0}, {1, 1}};
  EXPECT_EQ(om::oracle::expectation(Expansion::product({0, 0}, {1, 1}), two), 0.0);

  const auto s = om::partial_sum(om::testing::z2(), om::testing::square(2));
  const std::vector<Expansion> factors{s, s};
  const auto window = om::oracle::window_of(factors);
  EXPECT_EQ(window.size(), 7u);
  EXPECT_EQ(om::oracle::moment(factors, window), 10.0);
}

TEST(Oracle, WindowErrors) {
  const std::vector<MultiIndex> missing{{0, 0}};
  EXPECT_THROW(om::oracle::expectation(Expansion::site({1, 1}), missing), om::oracle::WindowError);
  std::vector<MultiIndex> huge;
  for (int i = 0; i < 25; ++i) huge.push_back({i, 0});
  EXPECT_THROW(om::oracle::expectation(Expansion::site({0, 0}), huge), om::oracle::WindowError);
}

TEST(Oracle, CondCheckExamples) {
  const std::vector<MultiIndex> w1{{0, 0}, {1, 0}};
  EXPECT_TRUE(om::oracle::cond_check(Expansion::site({1, 0}), {0, 0}, w1));
  const std::vector<MultiIndex> w2{{-1, 0}, {0, 0}};
  EXPECT_TRUE(om::oracle::cond_check(Expansion::product({0, 0}, {-1, 0}), {0, 0}, w2));

  const auto s = om::partial_sum(om::testing::z2(), om::testing::square(2));
  const std::vector<Expansion> es{s};
  const auto window = om::oracle::window_of(es);
  EXPECT_TRUE(om::oracle::cond_check(s, {0, 2}, window));
  EXPECT_EQ(om::cond_expect(s, {0, 2}), Expansion::site({0, 0}) + Expansion::site({0, 1}));
}

TEST(Oracle, DetectsWrongClaims) {
  const auto s = om::partial_sum(om::testing::z2(), om::testing::square(2));
  const std::vector<Expansion> es{s};
  const auto window = om::oracle::window_of(es);
  // The full expansion is not F_(0,2)-measurable; a claim that keeps it must fail.
  EXPECT_GT(om::oracle::cond_deviation(s, {0, 2}, s, window), 0.5);
  EXPECT_GT(om::oracle::cond_deviation(s, {0, 2}, Expansion::site({0, 0}), window), 0.5);
}

TEST(Oracle, AgreesWithAlgebraOnRandomExpansions) {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 60; ++k) {
    const std::size_t d = 2 + k % 2;
    const Expansion a = om::testing::random_expansion(rng, d, 8, 0, 1);
    const Expansion b = om::testing::random_expansion(rng, d, 8, 0, 1);
    const std::vector<Expansion> both{a, b};
    const auto window = om::oracle::window_of(both);
    ASSERT_LE(window.size(), 16u);
    const double sigma2 = 0.5 + 0.25 * (k % 4);
    EXPECT_NEAR(om::oracle::expectation(a, window, sigma2), a.constant_term(), 1e-12);
    EXPECT_NEAR(om::oracle::inner(a, b, window, sigma2), om::inner(a, b, sigma2), 1e-12);
    const MultiIndex c = om::testing::random_site(rng, d, -1, 2);
    EXPECT_TRUE(om::oracle::cond_check(a, c, window));
  }
}
