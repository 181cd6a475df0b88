#ifndef SYNCCTL_MIN_TIME_H_
#define SYNCCTL_MIN_TIME_H_

// Minimal-time synchronization with a norm budget M. The minimal norm
// N(T, y0) is strictly decreasing in T with limit M(y0), so the minimal time
// T(M, y0) is the root of N(T, y0) = M and exists iff M > M(y0). M(y0) is
// estimated from above by N(T_max, y0).

#include <string_view>
#include <vector>

#include "syncctl/min_norm.h"

namespace syncctl {

struct MinTimeOptions {
  double t_lo = 1e-2;
  double t_hi = 2.0;
  double bisect_tol = 1e-3;
  double t_max = 8.0;
};

// Smallest lower bracket tried before giving up.
inline constexpr double kMinHorizon = 1e-6;
// Budgets within this relative distance of the limit estimate are flagged.
inline constexpr double kInconclusiveBand = 0.05;

enum class MinTimeStatus { kTrivialZero, kNoOptimalControl, kSolved,
                           kNotSynchronizable };

std::string_view StatusName(MinTimeStatus s);

struct LimitNormEstimate {
  double value = 0.0;  // N(T_max, y0)
  double half_value = 0.0;  // N(T_max / 2, y0)
  // |N(T_max) - N(T_max/2)| / N(T_max/2); large values mean the estimate
  // has not settled.
  double relative_gap = 0.0;
  bool converged = true;
};

LimitNormEstimate EstimateLimitNorm(const MinNormSolver& solver,
                                    const StateField& y0, double t_max);

struct BracketStep {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double n_lo = 0.0;
  double n_hi = 0.0;
};

struct MinTimeResult {
  MinTimeStatus status = MinTimeStatus::kNotSynchronizable;
  double t_star = 0.0;
  ControlSignal control;  // on (0, t_star); zero afterwards
  double budget = 0.0;     // M
  double achieved_norm = 0.0;
  double m_limit_estimate = 0.0;
  double limit_gap = 0.0;
  bool inconclusive = false;
  int bisection_iters = 0;
  std::vector<BracketStep> brackets;
  // Minimal-norm solve at t_star (Solved only).
  MinNormResult min_norm;
};

// Whether y0 already lies in the target (H1: Dy0 = 0; H2: y0 = 0).
bool InTarget(const MinNormSolver& solver, const StateField& y0);

// Throws BracketFailure when N(T) = M cannot be bracketed in
// [kMinHorizon, t_max].
MinTimeResult SolveMinTime(double budget, const StateField& y0,
                           const MinNormSolver& solver,
                           const MinTimeOptions& options);

struct VerificationReport {
  double horizon = 0.0;
  // ||D y(T)|| / ||D y0|| for the full system driven by the control.
  double sync_residual = 0.0;
  // ||y(T)|| / ||y0||.
  double null_residual = 0.0;
  // Max over [T, T + post_horizon] of the branch residual with u = 0 after T:
  // ||Dy|| / ||Dy0|| under H1, ||y|| / ||y0|| under H2.
  double persistence_residual = 0.0;
  double control_norm = 0.0;
  double reference_norm = 0.0;  // N for min-norm, M for min-time
  double norm_relative_error = 0.0;
  bool within_budget = true;  // min-time only: ||u|| <= M (1 + 1e-3)
  bool support_ok = true;
  // (t, ||D y(t)|| / ||D y0||) on [0, T + post_horizon].
  std::vector<std::pair<double, double>> series;
};

inline constexpr double kBudgetSlack = 1e-3;

// Applies `control` to y_t - Δy + Ay = χ_ω B u from y0 (the control's time
// grid fixes the horizon), then continues with u = 0 for post_horizon using the
// same dt (or post_horizon / nt_ref when the horizon is zero).
VerificationReport VerifyControl(const CouplingPair& pair,
                                 const SyncStructure& structure,
                                 const SpatialGrid& grid,
                                 const OmegaMask& mask, const StateField& y0,
                                 const ControlSignal& control,
                                 double reference_norm, bool is_budget,
                                 double post_horizon, int nt_ref);

VerificationReport VerifySolution(const MinNormResult& result,
                                  const CouplingPair& pair,
                                  const SyncStructure& structure,
                                  const MinNormSolver& solver,
                                  const StateField& y0, double post_horizon);
VerificationReport VerifySolution(const MinTimeResult& result,
                                  const CouplingPair& pair,
                                  const SyncStructure& structure,
                                  const MinNormSolver& solver,
                                  const StateField& y0, double post_horizon);

}  // namespace syncctl

#endif  // SYNCCTL_MIN_TIME_H_
