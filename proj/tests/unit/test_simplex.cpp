#include <gtest/gtest.h>

#include "mmregret/simplex.hpp"

using namespace mmr::lp;

TEST(Simplex, TextbookMaximization) {
  // max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
  LinearProgram p(2);
  p.c = {3, 5};
  p.add_row({1, 0}, 4);
  p.add_row({0, 2}, 12);
  p.add_row({3, 2}, 18);
  const LpSolution s = solve(p);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective, 36.0, 1e-12);
  EXPECT_NEAR(s.x[0], 2.0, 1e-12);
  EXPECT_NEAR(s.x[1], 6.0, 1e-12);
  EXPECT_LE(max_violation(p, s.x), 1e-12);
}

TEST(Simplex, UpperBoundsWithoutRows) {
  LinearProgram p(3);
  p.c = {1, -1, 2};
  p.upper = {0.5, 1, 2};
  const LpSolution s = solve(p);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective, 4.5, 1e-15);
  EXPECT_EQ(s.x[1], 0.0);
}

TEST(Simplex, MixesBoundsAndRows) {
  // max x + y  s.t. x + 2y <= 2, x <= 1.5, y <= 1  ->  x = 1.5, y = 0.25
  LinearProgram p(2);
  p.c = {1, 1};
  p.upper = {1.5, 1};
  p.add_row({1, 2}, 2);
  const LpSolution s = solve(p);
  EXPECT_NEAR(s.objective, 1.75, 1e-12);
  EXPECT_NEAR(s.x[0], 1.5, 1e-12);
  EXPECT_NEAR(s.x[1], 0.25, 1e-12);
}

TEST(Simplex, DetectsUnbounded) {
  LinearProgram p(2);
  p.c = {1, 1};
  p.add_row({1, -1}, 1);
  EXPECT_EQ(solve_double(p).status, LpStatus::Unbounded);
}

TEST(Simplex, DegenerateCyclingExampleTerminates) {
  // Beale's example, which cycles under naive Dantzig pricing.
  LinearProgram p(4);
  p.c = {0.75, -150, 0.02, -6};
  p.add_row({0.25, -60, -0.04, 9}, 0);
  p.add_row({0.5, -90, -0.02, 3}, 0);
  p.add_row({0, 0, 1, 0}, 1);
  SimplexOptions opts;
  opts.bland_after = 2;
  const LpSolution s = solve(p, opts);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective, 0.05, 1e-12);
}

TEST(Simplex, LongDoubleAgreesWithDouble) {
  LinearProgram p(3);
  p.c = {2, 3, 4};
  p.upper = {10, 10, 10};
  p.add_row({3, 2, 1}, 10);
  p.add_row({2, 5, 3}, 15);
  const LpSolution d = solve_double(p);
  const LpSolution l = solve_long_double(p);
  EXPECT_NEAR(d.objective, l.objective, 1e-12);
  EXPECT_TRUE(l.extended_precision);
  EXPECT_NEAR(d.objective, 20.0, 1e-12);  // x = (0, 0, 5)
}

TEST(Simplex, RejectsNegativeRightHandSide) {
  LinearProgram p(1);
  p.c = {1};
  EXPECT_ANY_THROW(p.add_row({1}, -1));
}
