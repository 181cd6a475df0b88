#include "syncctl/min_norm.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "syncctl/errors.h"
#include "syncctl/parallel.h"
#include "syncctl/simd/kernels.h"

namespace syncctl {

OperatingSystem MakeOperatingSystem(const CouplingPair& pair,
                                    const SyncStructure& structure) {
  OperatingSystem op;
  op.hypothesis = structure.hypothesis;
  switch (structure.hypothesis) {
    case Hypothesis::kH1:
      op.coupling = *structure.a_reduced;
      op.input = structure.d * pair.b;
      op.reduce = structure.d;
      break;
    case Hypothesis::kH2:
      op.coupling = pair.a;
      op.input = pair.b;
      op.reduce = Matrix::Identity(pair.n(), pair.n());
      break;
    case Hypothesis::kNeither:
      throw SyncError(ErrorCode::kNotSynchronizable,
                      "pair satisfies neither H1 nor H2");
  }
  return op;
}

HumOperator::HumOperator(const OperatingSystem& op, const SpatialGrid& grid,
                         const TimeGrid& time, const OmegaMask& mask)
    : reduce_(op.reduce),
      system_(op.coupling, op.input, grid, time, mask) {
  if (op.hypothesis == Hypothesis::kNeither) {
    throw SyncError(ErrorCode::kNotSynchronizable,
                    "pair satisfies neither H1 nor H2");
  }
}

StateField HumOperator::InitialState(const StateField& y0) const {
  return ApplyPointwise(reduce_, y0);
}

StateField HumOperator::FreeDriftFinal(const StateField& y0) const {
  return system_.ForwardFinal(InitialState(y0), nullptr);
}

StateField HumOperator::Gramian(const StateField& terminal) const {
  const ControlSignal v = system_.ObserveAdjoint(terminal);
  return system_.ForwardFinal(system_.ZeroState(), &v);
}

double HumOperator::DualFunctional(const StateField& terminal,
                                   const StateField& y0) const {
  StateField psi0;
  const ControlSignal v = system_.ObserveAdjoint(terminal, &psi0);
  const double dx = grid().dx;
  return 0.5 * v.SquaredNorm(dx) + Inner(psi0, InitialState(y0), dx);
}

StateField HumOperator::DualGradient(const StateField& terminal,
                                     const StateField& y0) const {
  return Gramian(terminal) + FreeDriftFinal(y0);
}

StateField FreeDriftFinal(const OperatingSystem& op, const StateField& y0,
                          const SpatialGrid& grid, const TimeGrid& time,
                          const OmegaMask& mask) {
  return HumOperator(op, grid, time, mask).FreeDriftFinal(y0);
}

StateField GramianApply(const OperatingSystem& op, const StateField& terminal,
                        const SpatialGrid& grid, const TimeGrid& time,
                        const OmegaMask& mask) {
  return HumOperator(op, grid, time, mask).Gramian(terminal);
}

double EvalDualFunctional(const OperatingSystem& op,
                          const StateField& terminal, const StateField& y0,
                          const SpatialGrid& grid, const TimeGrid& time,
                          const OmegaMask& mask) {
  return HumOperator(op, grid, time, mask).DualFunctional(terminal, y0);
}

StateField GradDualFunctional(const OperatingSystem& op,
                              const StateField& terminal, const StateField& y0,
                              const SpatialGrid& grid, const TimeGrid& time,
                              const OmegaMask& mask) {
  return HumOperator(op, grid, time, mask).DualGradient(terminal, y0);
}

MinNormResult SolveMinNorm(const HumOperator& hum, const StateField& y0,
                           const HumOptions& options) {
  if (!(options.cg_tol > 0.0 && options.cg_tol < 1.0)) {
    throw SyncError(ErrorCode::kValidationError, "cg_tol must lie in (0,1)");
  }
  const ParabolicSystem& sys = hum.system();
  const double dx = hum.grid().dx;

  MinNormResult out;
  const StateField z0 = hum.InitialState(y0);
  out.initial_norm = Norm(z0, dx);
  out.target_tol =
      options.target_tol.value_or(kDefaultTargetScale * out.initial_norm);
  if (options.target_tol && !(*options.target_tol > 0.0)) {
    throw SyncError(ErrorCode::kValidationError, "target_tol must be > 0");
  }

  const StateField drift = sys.ForwardFinal(z0, nullptr);
  // Right-hand side of (G + eps I) ψ = -z_free(T).
  StateField rhs = -1.0 * drift;
  const double rhs_norm = Norm(rhs, dx);

  out.psi_terminal = sys.ZeroState();
  if (rhs_norm == 0.0) {
    out.control = sys.ZeroControl();
    out.psi0 = sys.ZeroState();
    out.converged = true;
    out.stop_reason = "zero_rhs";
    out.objective_history = {0.0};
    return out;
  }

  if (!(options.eps_reg >= 0.0) || !(options.rq_cutoff >= 0.0)) {
    throw SyncError(ErrorCode::kValidationError,
                    "eps_reg and rq_cutoff must be >= 0");
  }
  out.eps_reg = options.eps_reg;
  const double eps = out.eps_reg;

  // Conjugate gradients in the dx-weighted inner product, from ψ = 0. Every
  // iterate is a Galerkin solution on the current Krylov space, so
  // <ψ, b - (G + eps) ψ> = 0 up to rounding.
  StateField& psi = out.psi_terminal;
  StateField r = rhs;
  StateField p = r;
  double rr = Inner(r, r, dx);
  // q(ψ) = 1/2 <(G+eps)ψ, ψ> - <b, ψ>, updated incrementally.
  double objective = 0.0;
  out.objective_history.push_back(objective);
  const double stop = options.cg_tol * rhs_norm;
  std::vector<StateField> basis{(1.0 / std::sqrt(rr)) * r};
  out.stop_reason = "max_iter";
  int iter = 0;
  while (iter < options.cg_max_iter) {
    StateField ap = hum.Gramian(p);
    const double pp = Inner(p, p, dx);
    const double pgp = Inner(p, ap, dx);
    const double quotient = pgp / pp;
    out.gramian_scale = std::max(out.gramian_scale, quotient);
    if (!(quotient > options.rq_cutoff * out.gramian_scale)) {
      out.stop_reason = "rq_cutoff";
      break;
    }
    simd::Axpy(eps, p.values(), ap.values());
    const double pap = pgp + eps * pp;
    const double alpha = rr / pap;
    // q(ψ + αp) - q(ψ) = -α <r, p> + 1/2 α^2 <p, Ap>, and <r, p> = <r, r>.
    objective += -alpha * rr + 0.5 * alpha * alpha * pap;
    simd::Axpy(alpha, p.values(), psi.values());
    simd::Axpy(-alpha, ap.values(), r.values());
    ++iter;
    out.objective_history.push_back(objective);
    // Full reorthogonalization against earlier residual directions keeps
    // the Krylov basis orthogonal on the ill-conditioned Gramian.
    for (int pass = 0; pass < 2; ++pass) {
      for (const StateField& q : basis) {
        simd::Axpy(-Inner(q, r, dx), q.values(), r.values());
      }
    }
    const double rr_next = Inner(r, r, dx);
    if (std::sqrt(rr_next) <= stop) {
      out.stop_reason = "tolerance";
      break;
    }
    if (!(rr_next > 0.0)) {
      out.stop_reason = "breakdown";
      break;
    }
    basis.push_back((1.0 / std::sqrt(rr_next)) * r);
    simd::Xpby(r.values(), rr_next / rr, p.values());
    rr = rr_next;
  }
  out.iterations = iter;

  out.control = sys.ObserveAdjoint(psi, &out.psi0);
  out.norm_value = out.control.Norm(dx);
  const StateField reached = sys.ForwardFinal(z0, &out.control);
  out.residual = Norm(reached, dx);
  out.converged = out.residual <= out.target_tol;
  // N is 1-homogeneous in the target state, so the unsteered fraction of
  // z_free(T) bounds the relative error of N to first order.
  out.noise_estimate = out.norm_value * out.residual / rhs_norm;

  int active = 0;
  for (int j = 0; j < out.control.time().nt; ++j) {
    const auto step = out.control.step(j);
    if (std::sqrt(dx * simd::SumSquares(step)) > 1e-12) ++active;
  }
  out.active_fraction =
      static_cast<double>(active) / std::max(1, out.control.time().nt);
  return out;
}

MinNormSolver::MinNormSolver(OperatingSystem op, SpatialGrid grid,
                             OmegaMask mask, HumOptions options)
    : op_(std::move(op)),
      grid_(grid),
      mask_(std::move(mask)),
      options_(std::move(options)) {
  if (op_.hypothesis == Hypothesis::kNeither) {
    throw SyncError(ErrorCode::kNotSynchronizable,
                    "pair satisfies neither H1 nor H2");
  }
  if (options_.nt_ref < 1) {
    throw SyncError(ErrorCode::kValidationError, "nt_ref must be >= 1");
  }
}

TimeGrid MinNormSolver::TimeGridFor(double horizon) const {
  return BuildTimeGrid(horizon, options_.nt_ref);
}

HumOperator MinNormSolver::OperatorFor(double horizon) const {
  return HumOperator(op_, grid_, TimeGridFor(horizon), mask_);
}

MinNormResult MinNormSolver::Solve(double horizon,
                                   const StateField& y0) const {
  return SolveMinNorm(OperatorFor(horizon), y0, options_);
}

double MinNormSolver::InitialNorm(const StateField& y0) const {
  return Norm(ApplyPointwise(op_.reduce, y0), grid_.dx);
}

std::vector<NormCurvePoint> MinNormSolver::NormCurve(
    const std::vector<double>& horizons, const StateField& y0) const {
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0) || (i > 0 && !(horizons[i] > horizons[i - 1]))) {
      throw SyncError(ErrorCode::kValidationError,
                      "norm-curve horizons must be positive and ascending");
    }
  }
  std::vector<NormCurvePoint> out(horizons.size());
  ParallelFor(static_cast<int>(horizons.size()), options_.threads,
              [&](int i) {
                const MinNormResult r = Solve(horizons[i], y0);
                out[i] = NormCurvePoint{horizons[i], r.norm_value,
                                        r.converged,  r.iterations,
                                        r.residual,   r.noise_estimate};
              });
  return out;
}

}  // namespace syncctl
