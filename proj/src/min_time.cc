#include "syncctl/min_time.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "syncctl/errors.h"

namespace syncctl {

std::string_view StatusName(MinTimeStatus s) {
  switch (s) {
    case MinTimeStatus::kTrivialZero: return "TrivialZero";
    case MinTimeStatus::kNoOptimalControl: return "NoOptimalControl";
    case MinTimeStatus::kSolved: return "Solved";
    case MinTimeStatus::kNotSynchronizable: return "NotSynchronizable";
  }
  return "NotSynchronizable";
}

LimitNormEstimate EstimateLimitNorm(const MinNormSolver& solver,
                                    const StateField& y0, double t_max) {
  if (!(t_max > 0.0)) {
    throw SyncError(ErrorCode::kValidationError, "T_max must be > 0");
  }
  const auto curve = solver.NormCurve({0.5 * t_max, t_max}, y0);
  LimitNormEstimate out;
  out.half_value = curve[0].norm_value;
  out.value = curve[1].norm_value;
  out.converged = curve[0].converged && curve[1].converged;
  out.relative_gap = out.half_value > 0.0
                         ? std::abs(out.value - out.half_value) / out.half_value
                         : 0.0;
  return out;
}

bool InTarget(const MinNormSolver& solver, const StateField& y0) {
  const StateField z0 =
      ApplyPointwise(solver.operating_system().reduce, y0);
  return z0.IsZero();
}

MinTimeResult SolveMinTime(double budget, const StateField& y0,
                           const MinNormSolver& solver,
                           const MinTimeOptions& options) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw SyncError(ErrorCode::kValidationError, "M must be > 0");
  }
  if (!(options.t_lo > 0.0) || !(options.t_hi > options.t_lo) ||
      !(options.bisect_tol > 0.0) || !(options.t_max >= options.t_hi)) {
    throw SyncError(ErrorCode::kValidationError,
                    "need 0 < T_lo < T_hi <= T_max and bisect_tol > 0");
  }
  MinTimeResult out;
  out.budget = budget;

  if (InTarget(solver, y0)) {
    out.status = MinTimeStatus::kTrivialZero;
    out.t_star = 0.0;
    out.control = ControlSignal(TimeGrid{0.0, 0, 0.0},
                                solver.operating_system().input.cols(),
                                solver.grid().nx, solver.mask());
    return out;
  }

  const LimitNormEstimate limit = EstimateLimitNorm(solver, y0, options.t_max);
  out.m_limit_estimate = limit.value;
  out.limit_gap = limit.relative_gap;
  out.inconclusive =
      std::abs(budget - limit.value) <= kInconclusiveBand * limit.value;
  if (budget <= limit.value) {
    out.status = MinTimeStatus::kNoOptimalControl;
    return out;
  }

  auto norm_at = [&](double t) { return solver.Solve(t, y0).norm_value; };

  double lo = options.t_lo;
  double hi = options.t_hi;
  double n_hi = norm_at(hi);
  double n_lo = -1.0;
  // Expand upwards until N(hi) < M. The previous hi becomes a lower bracket.
  while (n_hi >= budget) {
    if (hi >= options.t_max) {
      throw SyncError(ErrorCode::kBracketFailure,
                      "N(T_hi) = " + std::to_string(n_hi) +
                          " still >= M at T_max = " +
                          std::to_string(options.t_max));
    }
    lo = hi;
    n_lo = n_hi;
    hi = std::min(2.0 * hi, options.t_max);
    n_hi = norm_at(hi);
  }
  if (n_lo < 0.0) {
    n_lo = norm_at(lo);
    // Shrink downwards until N(lo) > M. The previous lo becomes an upper
    // bracket.
    while (n_lo <= budget) {
      if (lo <= kMinHorizon) {
        throw SyncError(ErrorCode::kBracketFailure,
                        "N(T_lo) = " + std::to_string(n_lo) +
                            " still <= M at T = " + std::to_string(lo));
      }
      hi = lo;
      n_hi = n_lo;
      lo = std::max(0.5 * lo, kMinHorizon);
      n_lo = norm_at(lo);
    }
  }
  out.brackets.push_back({lo, hi, n_lo, n_hi});

  while (hi - lo > options.bisect_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    const double n_mid = norm_at(mid);
    if (n_mid > budget) {
      lo = mid;
      n_lo = n_mid;
    } else {
      hi = mid;
      n_hi = n_mid;
    }
    ++out.bisection_iters;
    out.brackets.push_back({lo, hi, n_lo, n_hi});
  }

  // N is smooth and close to exponential in T inside the final bracket, so
  // interpolate log N linearly; the result stays inside [lo, hi].
  out.t_star = 0.5 * (lo + hi);
  if (n_lo > budget && budget > n_hi && n_hi > 0.0) {
    const double w = std::log(n_lo / budget) / std::log(n_lo / n_hi);
    out.t_star = lo + std::clamp(w, 0.0, 1.0) * (hi - lo);
  }
  out.min_norm = solver.Solve(out.t_star, y0);
  out.achieved_norm = out.min_norm.norm_value;
  out.control = out.min_norm.control;
  out.status = MinTimeStatus::kSolved;
  return out;
}

namespace {

double SafeRatio(double num, double den, double fallback_den) {
  if (den > 0.0) return num / den;
  return fallback_den > 0.0 ? num / fallback_den : num;
}

}  // namespace

VerificationReport VerifyControl(const CouplingPair& pair,
                                 const SyncStructure& structure,
                                 const SpatialGrid& grid,
                                 const OmegaMask& mask, const StateField& y0,
                                 const ControlSignal& control,
                                 double reference_norm, bool is_budget,
                                 double post_horizon, int nt_ref) {
  VerificationReport rep;
  const TimeGrid& tg = control.time();
  rep.horizon = tg.horizon;
  const double dx = grid.dx;
  const StateField dy0 = ApplyPointwise(structure.d, y0);
  const double dy0_norm = Norm(dy0, dx);
  const double y0_norm = Norm(y0, dx);
  const bool full_null = structure.hypothesis == Hypothesis::kH2;

  auto sync_ratio = [&](const StateField& y) {
    return SafeRatio(Norm(ApplyPointwise(structure.d, y), dx), dy0_norm,
                     y0_norm);
  };
  auto branch_ratio = [&](const StateField& y) {
    return full_null ? SafeRatio(Norm(y, dx), y0_norm, 1.0) : sync_ratio(y);
  };

  StateField y_final = y0;
  rep.series.emplace_back(0.0, sync_ratio(y0));
  if (tg.nt > 0) {
    const ParabolicSystem full(pair.a, pair.b, grid, tg, mask);
    const Trajectory traj = full.Forward(y0, &control);
    for (int j = 1; j <= tg.nt; ++j) {
      rep.series.emplace_back(tg.t(j), sync_ratio(traj.snapshots[j]));
    }
    y_final = traj.snapshots.back();
  }
  rep.sync_residual = sync_ratio(y_final);
  rep.null_residual = SafeRatio(Norm(y_final, dx), y0_norm, 1.0);
  rep.persistence_residual = branch_ratio(y_final);

  if (post_horizon > 0.0) {
    const double dt = tg.nt > 0 ? tg.dt : post_horizon / std::max(1, nt_ref);
    const int steps = std::max(1, static_cast<int>(std::ceil(
                                      post_horizon / dt - 1e-9)));
    const TimeGrid post = BuildTimeGrid(steps * dt, steps);
    const ParabolicSystem free(pair.a, pair.b, grid, post, mask);
    const Trajectory traj = free.Forward(y_final, nullptr);
    for (int j = 1; j <= steps; ++j) {
      rep.series.emplace_back(tg.horizon + post.t(j),
                              sync_ratio(traj.snapshots[j]));
      rep.persistence_residual =
          std::max(rep.persistence_residual, branch_ratio(traj.snapshots[j]));
    }
  }

  rep.control_norm = tg.nt > 0 ? control.Norm(dx) : 0.0;
  rep.reference_norm = reference_norm;
  rep.norm_relative_error =
      SafeRatio(std::abs(rep.control_norm - reference_norm), reference_norm,
                1.0);
  rep.within_budget =
      !is_budget || rep.control_norm <= reference_norm * (1.0 + kBudgetSlack);
  rep.support_ok = control.RespectsSupport();
  return rep;
}

VerificationReport VerifySolution(const MinNormResult& result,
                                  const CouplingPair& pair,
                                  const SyncStructure& structure,
                                  const MinNormSolver& solver,
                                  const StateField& y0, double post_horizon) {
  return VerifyControl(pair, structure, solver.grid(), solver.mask(), y0,
                       result.control, result.norm_value, false, post_horizon,
                       solver.options().nt_ref);
}

VerificationReport VerifySolution(const MinTimeResult& result,
                                  const CouplingPair& pair,
                                  const SyncStructure& structure,
                                  const MinNormSolver& solver,
                                  const StateField& y0, double post_horizon) {
  return VerifyControl(pair, structure, solver.grid(), solver.mask(), y0,
                       result.control, result.budget, true, post_horizon,
                       solver.options().nt_ref);
}

}  // namespace syncctl
