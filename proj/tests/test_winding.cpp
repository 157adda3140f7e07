#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlrl/winding.hpp"

using nlrl::winding_number;

TEST(Winding, TopologicalWhenIntercellDominates) { EXPECT_EQ(winding_number(0.2, 0.8), 1); }
TEST(Winding, TrivialWhenIntracellDominates) { EXPECT_EQ(winding_number(0.8, 0.2), 0); }
TEST(Winding, DependsOnMagnitudesOnly) {
  EXPECT_EQ(winding_number(-0.6, -0.9), 1);
  EXPECT_EQ(winding_number(0.6, -0.9), 1);
  EXPECT_EQ(winding_number(-0.9, 0.6), 0);
}

TEST(Winding, NearlyClosedGap) {
  EXPECT_EQ(winding_number(0.5, 0.5 + 1e-7), 1);
  EXPECT_EQ(winding_number(0.5 + 1e-7, 0.5), 0);
}

TEST(Winding, ClosedGapIsRejected) {
  EXPECT_THROW(winding_number(0.5, 0.5), nlrl::DegenerateInput);
  EXPECT_THROW(winding_number(0.3, -0.3), nlrl::DegenerateInput);
  EXPECT_THROW(winding_number(0.0, 0.0), nlrl::DegenerateInput);
  EXPECT_THROW(winding_number(NAN, 0.1), nlrl::DomainError);
}

TEST(WindingProperty, MatchesMagnitudeThreshold) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  int checked = 0;
  while (checked < 1000) {
    const double mu = c(rng), nu = c(rng);
    if (std::abs(std::abs(mu) - std::abs(nu)) < 1e-9) continue;
    ASSERT_EQ(winding_number(mu, nu), std::abs(nu) > std::abs(mu) ? 1 : 0) << mu << ", " << nu;
    ++checked;
  }
}
