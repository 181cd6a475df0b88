#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "syncctl/errors.h"
#include "syncctl/min_time.h"

namespace syncctl {
namespace {

using testing::B4Instance;
using testing::B5Instance;

StateField Synchronized(const SpatialGrid& g) {
  StateField y0(2, g.nx);
  for (int i = 0; i < g.nx; ++i) y0(0, i) = y0(1, i) = std::sin(M_PI * g.x(i));
  return y0;
}

TEST(LimitNorm, ZeroOnTarget) {
  const B4Instance b;
  const LimitNormEstimate e = EstimateLimitNorm(b.solver, Synchronized(b.grid), 4.0);
  EXPECT_EQ(e.value, 0.0);
}

TEST(LimitNorm, MonotoneInTmax) {
  const B4Instance b;
  const double at2 = EstimateLimitNorm(b.solver, b.y0, 2.0).value;
  const double at4 = EstimateLimitNorm(b.solver, b.y0, 4.0).value;
  EXPECT_LE(at4, at2);
}

TEST(LimitNorm, LinearInScale) {
  const B4Instance b;
  const double one = EstimateLimitNorm(b.solver, b.y0, 2.0).value;
  const double two = EstimateLimitNorm(b.solver, 2.0 * b.y0, 2.0).value;
  EXPECT_NEAR(two, 2.0 * one, 1e-6 * one);
}

TEST(MinTime, TrivialZero) {
  const B4Instance b;
  const MinTimeResult r =
      SolveMinTime(1.0, Synchronized(b.grid), b.solver, MinTimeOptions{});
  EXPECT_EQ(r.status, MinTimeStatus::kTrivialZero);
  EXPECT_EQ(r.t_star, 0.0);
  for (double v : r.control.values()) EXPECT_EQ(v, 0.0);
  const VerificationReport v = VerifySolution(r, b.pair, b.structure, b.solver,
                                              Synchronized(b.grid), 0.5);
  EXPECT_EQ(v.sync_residual, 0.0);
  EXPECT_LE(v.persistence_residual, 1e-10);
}

TEST(MinTime, NoOptimalControlBelowLimit) {
  const B4Instance b;
  const MinTimeOptions opts;
  const double limit = EstimateLimitNorm(b.solver, b.y0, opts.t_max).value;
  const MinTimeResult r = SolveMinTime(0.5 * limit, b.y0, b.solver, opts);
  EXPECT_EQ(r.status, MinTimeStatus::kNoOptimalControl);
  EXPECT_EQ(r.m_limit_estimate, limit);
  EXPECT_FALSE(r.inconclusive);
  const MinTimeResult near = SolveMinTime(0.98 * limit, b.y0, b.solver, opts);
  EXPECT_EQ(near.status, MinTimeStatus::kNoOptimalControl);
  EXPECT_TRUE(near.inconclusive);
}

TEST(MinTime, BracketsStayOrdered) {
  const B4Instance b;
  const double m = b.solver.Solve(0.7, b.y0).norm_value;
  const MinTimeResult r = SolveMinTime(m, b.y0, b.solver, MinTimeOptions{});
  ASSERT_EQ(r.status, MinTimeStatus::kSolved);
  for (const BracketStep& s : r.brackets) {
    EXPECT_GT(s.n_lo, m);
    EXPECT_LT(s.n_hi, m);
    EXPECT_LT(s.t_lo, s.t_hi);
  }
  const BracketStep& last = r.brackets.back();
  EXPECT_LE(last.t_hi - last.t_lo, 1e-3 * last.t_hi);
  EXPECT_GE(r.t_star, last.t_lo);
  EXPECT_LE(r.t_star, last.t_hi);
  EXPECT_NEAR(r.t_star, 0.7, 1e-3 * 0.7);
}

TEST(MinTime, ExpandsUpperBracket) {
  const B4Instance b;
  const double m = b.solver.Solve(3.0, b.y0).norm_value;
  const MinTimeResult r = SolveMinTime(m, b.y0, b.solver, MinTimeOptions{});
  ASSERT_EQ(r.status, MinTimeStatus::kSolved);
  EXPECT_NEAR(r.t_star, 3.0, 3e-3);
}

TEST(MinTime, ShrinksLowerBracket) {
  const B4Instance b;
  const double m = b.solver.Solve(0.05, b.y0).norm_value;
  MinTimeOptions opts;
  opts.t_lo = 0.2;
  const MinTimeResult r = SolveMinTime(m, b.y0, b.solver, opts);
  ASSERT_EQ(r.status, MinTimeStatus::kSolved);
  EXPECT_NEAR(r.t_star, 0.05, 1e-3 * 0.05 + 1e-12);
}

// Budgets just above the estimate N(T_max) are bracketed inside T_max.
TEST(MinTime, BudgetJustAboveEstimate) {
  const B4Instance b;
  MinTimeOptions opts;
  opts.t_hi = 0.2;
  opts.t_max = 0.4;
  const double n04 = b.solver.Solve(0.4, b.y0).norm_value;
  const MinTimeResult r = SolveMinTime(n04 * 1.001, b.y0, b.solver, opts);
  ASSERT_EQ(r.status, MinTimeStatus::kSolved);
  EXPECT_TRUE(r.inconclusive);
  EXPECT_LE(r.t_star, 0.4);
  EXPECT_GT(r.t_star, 0.39);
}

TEST(MinTime, BudgetIsSaturated) {
  const B4Instance b;
  const double m = b.solver.Solve(1.0, b.y0).norm_value;
  const MinTimeResult r = SolveMinTime(m, b.y0, b.solver, MinTimeOptions{});
  ASSERT_EQ(r.status, MinTimeStatus::kSolved);
  const VerificationReport v =
      VerifySolution(r, b.pair, b.structure, b.solver, b.y0, 0.5);
  EXPECT_LE(v.norm_relative_error, 1e-3);
  EXPECT_TRUE(v.within_budget);
  EXPECT_LE(v.sync_residual, 1e-4);
  // zero after T*: the post window is simulated without control
  EXPECT_LE(v.persistence_residual, 1e-4);
  EXPECT_GT(v.series.back().first, r.t_star + 0.49);
}

TEST(MinTime, TimeDecreasesWithBudget) {
  const B4Instance b;
  const double m1 = b.solver.Solve(1.0, b.y0).norm_value;
  const double m2 = b.solver.Solve(0.5, b.y0).norm_value;
  const MinTimeOptions opts;
  const double t1 = SolveMinTime(m1, b.y0, b.solver, opts).t_star;
  const double t2 = SolveMinTime(m2, b.y0, b.solver, opts).t_star;
  EXPECT_LT(t2, t1);
  EXPECT_GE(t1 - t2, 2.0 * opts.bisect_tol * t1);
}

TEST(MinTime, FullBranch) {
  const B5Instance b;
  const double m = b.solver.Solve(1.0, b.y0).norm_value;
  const MinTimeResult r = SolveMinTime(m, b.y0, b.solver, MinTimeOptions{});
  ASSERT_EQ(r.status, MinTimeStatus::kSolved);
  EXPECT_NEAR(r.t_star, 1.0, 2e-3);
  const MinTimeResult z =
      SolveMinTime(m, StateField(2, b.grid.nx), b.solver, MinTimeOptions{});
  EXPECT_EQ(z.status, MinTimeStatus::kTrivialZero);
}

TEST(MinTime, RejectsBadInput) {
  const B4Instance b;
  EXPECT_THROW(SolveMinTime(0.0, b.y0, b.solver, MinTimeOptions{}), SyncError);
  MinTimeOptions bad;
  bad.t_lo = 3.0;
  EXPECT_THROW(SolveMinTime(1.0, b.y0, b.solver, bad), SyncError);
}

}  // namespace
}  // namespace syncctl
