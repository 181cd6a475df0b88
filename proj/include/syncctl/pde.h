#ifndef SYNCCTL_PDE_H_
#define SYNCCTL_PDE_H_

// Backward-Euler discretization of  y_t - Δy + A y = χ_ω B u  on (0, L) with
// homogeneous Dirichlet conditions, and its exact discrete adjoint.
//
// One step reads (I + dt K) y_{j+1} = y_j + dt χ_ω B u_j, with
// K = Λ ⊗ I_k + I_nx ⊗ A and Λ = tridiag(-1, 2, -1) / dx^2. The adjoint step
// applies the transpose (I + dt K^T)^{-1}, so for every terminal dual ψ_T and
// control u
//
//   <ψ_T, z(T; 0, u)> = sum_j dt <χ_ω B^T ψ_j, u_j>
//
// holds up to rounding. ψ_j is the dual at the left knot t_j of step j.

#include <vector>

#include "syncctl/grid.h"
#include "syncctl/sync_algebra.h"

namespace syncctl {

// Factored (I + dt K) or its transpose, as a block tridiagonal matrix with
// k x k blocks. Immutable after construction.
class StepOperator {
 public:
  StepOperator(const Matrix& coupling, const SpatialGrid& grid, double dt,
               bool transpose);

  int k() const { return k_; }
  int nx() const { return nx_; }

  // Overwrites `field` with the solution of the step system. `work` is
  // resized as needed and may be reused between calls.
  void Solve(StateField& field, std::vector<double>& work) const;

 private:
  int k_;
  int nx_;
  double r_;  // dt / dx^2
  // Inverse of the eliminated diagonal block at each node, row-major k x k.
  std::vector<double> block_inverse_;
};

// A coupled parabolic system on a fixed space-time grid: forward and adjoint
// solves plus the observation χ_ω B^T. Shareable across threads.
class ParabolicSystem {
 public:
  ParabolicSystem(Matrix coupling, Matrix input, SpatialGrid grid,
                  TimeGrid time, OmegaMask mask);

  int k() const { return static_cast<int>(coupling_.rows()); }
  int m() const { return static_cast<int>(input_.cols()); }
  const SpatialGrid& grid() const { return grid_; }
  const TimeGrid& time() const { return time_; }
  const OmegaMask& mask() const { return mask_; }
  const Matrix& coupling() const { return coupling_; }
  const Matrix& input() const { return input_; }

  // `control` may be null for the uncontrolled system.
  Trajectory Forward(const StateField& y0, const ControlSignal* control) const;
  StateField ForwardFinal(const StateField& y0,
                          const ControlSignal* control) const;

  Trajectory Adjoint(const StateField& terminal) const;

  // v_j = mask ⊙ B^T ψ_j for j = 0..nt-1.
  ControlSignal Observe(const Trajectory& dual) const;
  // Observe(Adjoint(terminal)) without storing the dual trajectory. When
  // `initial` is non-null it receives ψ_0.
  ControlSignal ObserveAdjoint(const StateField& terminal,
                               StateField* initial = nullptr) const;

  ControlSignal ZeroControl() const;
  StateField ZeroState() const { return StateField(k(), grid_.nx); }

 private:
  void CheckState(const StateField& f, const char* what) const;
  void CheckControl(const ControlSignal& u) const;
  // rhs += dt * mask ⊙ (B u_j)
  void AddInput(const ControlSignal& u, int step, StateField& rhs) const;
  // out_j = mask ⊙ (B^T ψ)
  void ObserveInto(const StateField& psi, std::span<double> out) const;

  Matrix coupling_;
  Matrix input_;
  SpatialGrid grid_;
  TimeGrid time_;
  OmegaMask mask_;
  StepOperator forward_step_;
  StepOperator adjoint_step_;
};

// Free-function forms of the solver operations.
Trajectory ForwardSolve(const Matrix& a_sys, const Matrix& b_sys,
                        const StateField& y0, const ControlSignal* control,
                        const SpatialGrid& grid, const TimeGrid& time,
                        const OmegaMask& mask);
Trajectory AdjointSolve(const Matrix& a_sys, const StateField& terminal,
                        const SpatialGrid& grid, const TimeGrid& time);
ControlSignal Observe(const Trajectory& dual, const Matrix& b_sys,
                      const OmegaMask& mask, int nx);

// Applies a constant k' x k matrix pointwise in space, e.g. D y.
StateField ApplyPointwise(const Matrix& m, const StateField& f);

}  // namespace syncctl

#endif  // SYNCCTL_PDE_H_
