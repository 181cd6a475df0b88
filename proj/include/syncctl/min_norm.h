#ifndef SYNCCTL_MIN_NORM_H_
#define SYNCCTL_MIN_NORM_H_

// Minimal-norm synchronizing controls by the dual (HUM) route.
//
// Under H1 the solver works on the difference system z = Dy with coupling Ã
// and input DB; under H2 on the full system with (A, B). For a terminal dual
// ψ_T the Gramian is G ψ_T = z(T; 0, χ_ω B_sys^T ψ), and the dual functional
//
//   J(ψ_T) = 1/2 ||χ_ω B_sys^T ψ||^2_{L2(0,T)} + <ψ(0), z_0>
//
// has gradient G ψ_T + z_free(T). Its minimizer gives the optimal control
// v* = χ_ω B_sys^T ψ* on (0, T), extended by zero afterwards.

#include <optional>
#include <string>
#include <vector>

#include "syncctl/grid.h"
#include "syncctl/pde.h"
#include "syncctl/sync_algebra.h"

namespace syncctl {

struct HumOptions {
  double cg_tol = 1e-10;
  int cg_max_iter = 500;
  // Tikhonov shift added to the Gramian.
  double eps_reg = 0.0;
  // CG stops before taking a search direction p with
  // <p, Gp> / <p, p> < rq_cutoff * (largest such quotient seen so far).
  // Directions below this level lie in the numerical null space of G.
  double rq_cutoff = 1e-12;
  // Acceptable final-state norm. Unset: 1e-6 * ||z_0||.
  std::optional<double> target_tol;
  // Time steps per horizon; dt = T / nt_ref.
  int nt_ref = 200;
  int threads = 1;
};

inline constexpr double kDefaultTargetScale = 1e-6;

// The system the dual method runs on for a given classification.
struct OperatingSystem {
  Hypothesis hypothesis = Hypothesis::kNeither;
  Matrix coupling;  // Ã (H1) or A (H2)
  Matrix input;     // DB (H1) or B (H2)
  Matrix reduce;    // D (H1) or I (H2): maps y0 to the initial state
};

// Throws NotSynchronizable for Hypothesis::kNeither.
OperatingSystem MakeOperatingSystem(const CouplingPair& pair,
                                    const SyncStructure& structure);

// Gramian, dual functional and free drift of one operating system on one
// space-time grid.
class HumOperator {
 public:
  HumOperator(const OperatingSystem& op, const SpatialGrid& grid,
              const TimeGrid& time, const OmegaMask& mask);

  const ParabolicSystem& system() const { return system_; }
  const SpatialGrid& grid() const { return system_.grid(); }
  int dual_components() const { return system_.k(); }

  StateField InitialState(const StateField& y0) const;
  StateField FreeDriftFinal(const StateField& y0) const;
  StateField Gramian(const StateField& terminal) const;
  double DualFunctional(const StateField& terminal,
                        const StateField& y0) const;
  StateField DualGradient(const StateField& terminal,
                          const StateField& y0) const;

 private:
  Matrix reduce_;
  ParabolicSystem system_;
};

struct MinNormResult {
  ControlSignal control;
  double norm_value = 0.0;
  // ||z(T; z_0, v*)||, i.e. the final state reached with the control.
  double residual = 0.0;
  StateField psi_terminal;
  StateField psi0;
  int iterations = 0;
  bool converged = false;
  // Why CG stopped: "tolerance", "rq_cutoff", "max_iter", "zero_rhs" or
  // "breakdown".
  std::string stop_reason;
  double eps_reg = 0.0;
  // Largest Rayleigh quotient <p, Gp> / <p, p> met by CG.
  double gramian_scale = 0.0;
  double target_tol = 0.0;
  // ||z_0||, the denominator for relative residuals.
  double initial_norm = 0.0;
  // First-order uncertainty of norm_value: N * residual / ||z_free(T)||.
  double noise_estimate = 0.0;
  // Fraction of time steps with ||v*_j|| > 1e-12.
  double active_fraction = 0.0;
  // Regularized CG objective after each iteration (index 0 = start).
  std::vector<double> objective_history;
};

// Free-function forms; each builds a HumOperator on (grid, time, mask).
StateField FreeDriftFinal(const OperatingSystem& op, const StateField& y0,
                          const SpatialGrid& grid, const TimeGrid& time,
                          const OmegaMask& mask);
StateField GramianApply(const OperatingSystem& op, const StateField& terminal,
                        const SpatialGrid& grid, const TimeGrid& time,
                        const OmegaMask& mask);
double EvalDualFunctional(const OperatingSystem& op,
                          const StateField& terminal, const StateField& y0,
                          const SpatialGrid& grid, const TimeGrid& time,
                          const OmegaMask& mask);
StateField GradDualFunctional(const OperatingSystem& op,
                              const StateField& terminal, const StateField& y0,
                              const SpatialGrid& grid, const TimeGrid& time,
                              const OmegaMask& mask);

// Solves min ||v|| subject to z(T; z_0, v) = 0 on the given time grid.
MinNormResult SolveMinNorm(const HumOperator& hum, const StateField& y0,
                           const HumOptions& options);

struct NormCurvePoint {
  double horizon = 0.0;
  double norm_value = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
  double noise_estimate = 0.0;
};

// Minimal-norm solves on a fixed operating system, spatial grid and control
// region, with the per-horizon time grid dt = T / nt_ref.
class MinNormSolver {
 public:
  MinNormSolver(OperatingSystem op, SpatialGrid grid, OmegaMask mask,
                HumOptions options);

  const OperatingSystem& operating_system() const { return op_; }
  const SpatialGrid& grid() const { return grid_; }
  const OmegaMask& mask() const { return mask_; }
  const HumOptions& options() const { return options_; }

  TimeGrid TimeGridFor(double horizon) const;
  HumOperator OperatorFor(double horizon) const;
  MinNormResult Solve(double horizon, const StateField& y0) const;
  double InitialNorm(const StateField& y0) const;

  // Horizons must be positive and ascending. Entries may run in parallel.
  std::vector<NormCurvePoint> NormCurve(const std::vector<double>& horizons,
                                        const StateField& y0) const;

 private:
  OperatingSystem op_;
  SpatialGrid grid_;
  OmegaMask mask_;
  HumOptions options_;
};

}  // namespace syncctl

#endif  // SYNCCTL_MIN_NORM_H_
