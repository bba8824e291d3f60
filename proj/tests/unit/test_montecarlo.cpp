#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "orthomart/criteria.hpp"
#include "orthomart/montecarlo.hpp"
#include "orthomart/philox.hpp"
#include "zoo.hpp"

namespace om = orthomart;
using om::Expansion;
using om::MultiIndex;
using om::testing::square;

namespace {

double normal_quantile(double p, double variance) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (om::normal_cdf(mid, variance) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(SimulatePair, ExactIdentities) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto p1 = om::simulate_pair(om::testing::z1(), Expansion::site({1, 1}), square(4), seed);
    EXPECT_EQ(p1.s, p1.m);
    const auto p3 = om::simulate_pair(om::testing::z3(), Expansion::product({0, 1}, {1, 0}), square(4), seed);
    EXPECT_EQ(p3.s, p3.m);
  }
}

TEST(SimulatePair, Z2DifferenceIsTheBoundaryTerms) {
  const auto model = om::testing::z2(om::LawKind::gaussian);
  const auto rect = square(2);
  const auto p = om::simulate_pair(model, Expansion::site({1, 1}, 2.0), rect, 9, 4);
  // Same innovations on the same window, read back directly.
  const auto grid = om::draw_innovations(model.law(), om::field_window(model, rect), 9, 4);
  const double want = -grid.at({1, 2}) - grid.at({2, 1}) - grid.at({2, 2}) + grid.at({0, 0}) +
                      grid.at({0, 1}) + grid.at({1, 0});
  EXPECT_NEAR(p.s - p.m, want, 1e-12);
}

TEST(SimulateReplicates, IndependentOfThreadsAndPrefixStable) {
  const auto model = om::testing::z2(om::LawKind::gaussian);
  const Expansion d = Expansion::site({1, 1}, 2.0);
  const auto one = om::simulate_replicates(model, d, square(6), 200, 5, 1);
  const auto many = om::simulate_replicates(model, d, square(6), 200, 5, 8);
  const auto longer = om::simulate_replicates(model, d, square(6), 400, 5, 3);
  for (std::size_t r = 0; r < one.size(); ++r) {
    EXPECT_EQ(one[r].s, many[r].s);
    EXPECT_EQ(one[r].m, many[r].m);
    EXPECT_EQ(one[r].s, longer[r].s);
  }
}

TEST(EstimateError, Examples) {
  const auto iid = om::estimate_error(om::testing::z1(), Expansion::site({1, 1}), square(8), 50, 1);
  EXPECT_EQ(iid.mc_error_per_cell, 0.0);
  EXPECT_EQ(iid.standard_error, 0.0);
  const auto z2 = om::estimate_error(om::testing::z2(), Expansion::site({1, 1}, 2.0), square(8), 20000, 11);
  EXPECT_LE(std::abs(z2.mc_error_per_cell - 30.0 / 64), 4 * z2.standard_error);
  EXPECT_THROW(om::estimate_error(om::testing::z1(), Expansion::site({1, 1}), square(2), 1, 1),
               std::invalid_argument);
}

TEST(Clt, IidGaussianIsExactlyNormal) {
  const auto r = om::clt_experiment(om::testing::z1(om::LawKind::gaussian), square(16), 4000, 3, 2);
  ASSERT_TRUE(r.ks_statistic);
  EXPECT_LT(*r.ks_statistic, om::ks_critical_0001(4000));
  EXPECT_LE(std::abs(r.empirical_mean), 4 * std::sqrt(1.0 / 4000));
  EXPECT_GE(r.empirical_variance, 0.0);
  EXPECT_EQ(r.target_variance, 1.0);
}

TEST(Clt, DegenerateTargetIsFlagged) {
  const auto r = om::clt_experiment(om::testing::z2(), square(4), 100, 1, 1, Expansion());
  EXPECT_TRUE(r.degenerate_variance);
  EXPECT_FALSE(r.ks_statistic);
  EXPECT_THROW(om::clt_experiment(om::testing::z2(), square(4), 99, 1), std::invalid_argument);
}

TEST(Ks, Examples) {
  const std::size_t n = 500;
  std::vector<double> q;
  for (std::size_t i = 1; i <= n; ++i) q.push_back(normal_quantile((i - 0.5) / n, 2.0));
  EXPECT_LE(om::ks_statistic(q, 2.0), 0.5 / n + 1e-9);

  const std::vector<double> zeros(10, 0.0);
  EXPECT_DOUBLE_EQ(om::ks_statistic(zeros, 1.0), 0.5);

  om::CounterRng rng(2024, 0);
  std::vector<double> g(10000);
  for (double& v : g) v = rng.standard_normal();
  EXPECT_LT(om::ks_statistic(g, 1.0), 1.95 / 100);

  const std::vector<double> bad{0.0, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(om::ks_statistic(bad, 1.0), std::invalid_argument);
  EXPECT_THROW(om::ks_statistic({}, 1.0), std::invalid_argument);
  EXPECT_THROW(om::ks_statistic(zeros, 0.0), std::invalid_argument);
}

TEST(Ks, StatisticIsInUnitInterval) {
  const std::vector<double> far{100, 200, 300};
  const double d = om::ks_statistic(far, 1.0);
  EXPECT_GE(d, 0.0);
  EXPECT_LE(d, 1.0);
}
