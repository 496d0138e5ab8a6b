#include <gtest/gtest.h>

#include "drmg/lp.hpp"

using namespace drmg;

TEST(Simplex, TextbookMaximisation) {
  // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  (2, 6), 36
  LinearProgram lp(2);
  lp.objective = {3, 5};
  lp.add_le({1, 0}, 4);
  lp.add_le({0, 2}, 12);
  lp.add_le({3, 2}, 18);
  const auto sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 36.0, 1e-12);
  EXPECT_NEAR(sol.x[0], 2.0, 1e-12);
  EXPECT_NEAR(sol.x[1], 6.0, 1e-12);
}

TEST(Simplex, EqualityAndGreaterEqualRows) {
  // min x + y  s.t. x + y = 1, x >= 0.3  (as max -(x+y))
  LinearProgram lp(2);
  lp.objective = {-1, -1};
  lp.add_eq({1, 1}, 1);
  lp.add_ge({1, 0}, 0.3);
  const auto sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, -1.0, 1e-12);
  EXPECT_GE(sol.x[0], 0.3 - 1e-12);
}

TEST(Simplex, DetectsInfeasibility) {
  LinearProgram lp(1);
  lp.objective = {1};
  lp.add_le({1}, 1);
  lp.add_ge({1}, 2);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::kInfeasible);
}

TEST(Simplex, DetectsUnboundedness) {
  LinearProgram lp(2);
  lp.objective = {1, 0};
  lp.add_le({-1, 1}, 1);
  EXPECT_EQ(solve_lp(lp).status, LpStatus::kUnbounded);
}

TEST(Simplex, RedundantEqualitiesAreTolerated) {
  LinearProgram lp(3);
  lp.objective = {1, 2, 3};
  lp.add_eq({1, 1, 1}, 1);
  lp.add_eq({2, 2, 2}, 2);
  const auto sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 3.0, 1e-12);
}

TEST(Simplex, DegenerateProblemTerminates) {
  // Classic cycling example for the largest-coefficient rule.
  LinearProgram lp(4);
  lp.objective = {0.75, -20, 0.5, -6};
  lp.add_le({0.25, -8, -1, 9}, 0);
  lp.add_le({0.5, -12, -0.5, 3}, 0);
  lp.add_le({0, 0, 1, 0}, 1);
  const auto sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 1.25, 1e-9);
}
