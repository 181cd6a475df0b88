#include "syncctl/pde.h"

#include <cmath>
#include <string>
#include <utility>

#include "syncctl/errors.h"
#include "syncctl/simd/kernels.h"

namespace syncctl {

StepOperator::StepOperator(const Matrix& coupling, const SpatialGrid& grid,
                           double dt, bool transpose)
    : k_(static_cast<int>(coupling.rows())),
      nx_(grid.nx),
      r_(dt / (grid.dx * grid.dx)) {
  if (coupling.rows() != coupling.cols() || k_ < 1) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "step operator needs a square coupling matrix");
  }
  const Matrix a = transpose ? Matrix(coupling.transpose()) : coupling;
  const Matrix diag =
      (1.0 + 2.0 * r_) * Matrix::Identity(k_, k_) + dt * a;

  // Block Thomas elimination: M_0 = diag, M_i = diag - r^2 M_{i-1}^{-1}.
  block_inverse_.resize(std::size_t(nx_) * k_ * k_);
  Matrix prev_inverse;
  for (int i = 0; i < nx_; ++i) {
    Matrix pivot = diag;
    if (i > 0) pivot -= r_ * r_ * prev_inverse;
    Eigen::FullPivLU<Matrix> lu(pivot);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) {
      throw SyncError(ErrorCode::kLinearSolveFailure,
                      "singular pivot block at node " + std::to_string(i) +
                          " while factoring the step operator");
    }
    prev_inverse = lu.inverse();
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>(
        block_inverse_.data() + std::size_t(i) * k_ * k_, k_, k_) =
        prev_inverse;
  }
}

void StepOperator::Solve(StateField& field, std::vector<double>& work) const {
  const int k = k_;
  const int nx = nx_;
  work.resize(std::size_t(2) * k * nx);
  double* b = work.data();           // node-major right-hand side
  double* d = work.data() + k * nx;  // eliminated unknowns
  for (int c = 0; c < k; ++c) {
    const auto comp = field.component(c);
    for (int i = 0; i < nx; ++i) b[i * k + c] = comp[i];
  }

  const double* inv = block_inverse_.data();
  if (k == 1) {
    d[0] = inv[0] * b[0];
    for (int i = 1; i < nx; ++i) d[i] = inv[i] * (b[i] + r_ * d[i - 1]);
    for (int i = nx - 2; i >= 0; --i) d[i] += r_ * inv[i] * d[i + 1];
  } else {
    // Forward sweep: d_i = M_i^{-1} (b_i + r d_{i-1}).
    for (int i = 0; i < nx; ++i) {
      double* bi = b + i * k;
      if (i > 0) {
        const double* prev = d + (i - 1) * k;
        for (int c = 0; c < k; ++c) bi[c] += r_ * prev[c];
      }
      const double* mi = inv + std::size_t(i) * k * k;
      double* di = d + i * k;
      for (int row = 0; row < k; ++row) {
        double s = 0.0;
        for (int col = 0; col < k; ++col) s += mi[row * k + col] * bi[col];
        di[row] = s;
      }
    }
    // Back substitution: x_i = d_i + r M_i^{-1} x_{i+1}.
    for (int i = nx - 2; i >= 0; --i) {
      const double* mi = inv + std::size_t(i) * k * k;
      const double* next = d + (i + 1) * k;
      double* di = d + i * k;
      for (int row = 0; row < k; ++row) {
        double s = 0.0;
        for (int col = 0; col < k; ++col) s += mi[row * k + col] * next[col];
        di[row] += r_ * s;
      }
    }
  }

  for (int c = 0; c < k; ++c) {
    auto comp = field.component(c);
    for (int i = 0; i < nx; ++i) comp[i] = d[i * k + c];
  }
}

ParabolicSystem::ParabolicSystem(Matrix coupling, Matrix input,
                                 SpatialGrid grid, TimeGrid time,
                                 OmegaMask mask)
    : coupling_(std::move(coupling)),
      input_(std::move(input)),
      grid_(grid),
      time_(time),
      mask_(std::move(mask)),
      forward_step_(coupling_, grid_, time_.dt, /*transpose=*/false),
      adjoint_step_(coupling_, grid_, time_.dt, /*transpose=*/true) {
  if (input_.rows() != coupling_.rows() || input_.cols() < 1) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "input matrix must have one row per state component");
  }
  if (static_cast<int>(mask_.mask.size()) != grid_.nx) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "control mask does not match the spatial grid");
  }
}

void ParabolicSystem::CheckState(const StateField& f, const char* what) const {
  if (f.k() != k() || f.nx() != grid_.nx) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    std::string(what) + ": expected " + std::to_string(k()) +
                        "x" + std::to_string(grid_.nx) + " field, got " +
                        std::to_string(f.k()) + "x" + std::to_string(f.nx()));
  }
}

void ParabolicSystem::CheckControl(const ControlSignal& u) const {
  if (u.m() != m() || u.nx() != grid_.nx || u.time().nt != time_.nt) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "control signal shape does not match the system");
  }
}

void ParabolicSystem::AddInput(const ControlSignal& u, int step,
                               StateField& rhs) const {
  const auto uj = u.step(step);
  const int nx = grid_.nx;
  const double* mask = mask_.mask.data();
  for (int r = 0; r < k(); ++r) {
    auto target = rhs.component(r);
    for (int c = 0; c < m(); ++c) {
      const double coeff = time_.dt * input_(r, c);
      if (coeff == 0.0) continue;
      const double* src = uj.data() + std::size_t(c) * nx;
      for (int i = 0; i < nx; ++i) target[i] += coeff * mask[i] * src[i];
    }
  }
}

void ParabolicSystem::ObserveInto(const StateField& psi,
                                  std::span<double> out) const {
  const int nx = grid_.nx;
  for (int c = 0; c < m(); ++c) {
    auto dst = out.subspan(std::size_t(c) * nx, nx);
    std::fill(dst.begin(), dst.end(), 0.0);
    for (int r = 0; r < k(); ++r) {
      const double coeff = input_(r, c);
      if (coeff == 0.0) continue;
      simd::Axpy(coeff, psi.component(r), dst);
    }
    simd::Multiply(dst, mask_.mask, dst);
  }
}

Trajectory ParabolicSystem::Forward(const StateField& y0,
                                    const ControlSignal* control) const {
  CheckState(y0, "initial state");
  if (control) CheckControl(*control);
  Trajectory out{time_, {}};
  out.snapshots.reserve(time_.nt + 1);
  out.snapshots.push_back(y0);
  std::vector<double> work;
  StateField y = y0;
  for (int j = 0; j < time_.nt; ++j) {
    if (control) AddInput(*control, j, y);
    forward_step_.Solve(y, work);
    out.snapshots.push_back(y);
  }
  return out;
}

StateField ParabolicSystem::ForwardFinal(const StateField& y0,
                                         const ControlSignal* control) const {
  CheckState(y0, "initial state");
  if (control) CheckControl(*control);
  std::vector<double> work;
  StateField y = y0;
  for (int j = 0; j < time_.nt; ++j) {
    if (control) AddInput(*control, j, y);
    forward_step_.Solve(y, work);
  }
  return y;
}

Trajectory ParabolicSystem::Adjoint(const StateField& terminal) const {
  CheckState(terminal, "terminal dual state");
  Trajectory out{time_, std::vector<StateField>(time_.nt + 1)};
  std::vector<double> work;
  StateField psi = terminal;
  out.snapshots[time_.nt] = psi;
  for (int j = time_.nt - 1; j >= 0; --j) {
    adjoint_step_.Solve(psi, work);
    out.snapshots[j] = psi;
  }
  return out;
}

ControlSignal ParabolicSystem::ZeroControl() const {
  return ControlSignal(time_, m(), grid_.nx, mask_);
}

ControlSignal ParabolicSystem::Observe(const Trajectory& dual) const {
  if (static_cast<int>(dual.snapshots.size()) != time_.nt + 1) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "dual trajectory length does not match the time grid");
  }
  ControlSignal v = ZeroControl();
  for (int j = 0; j < time_.nt; ++j) {
    CheckState(dual.snapshots[j], "dual snapshot");
    ObserveInto(dual.snapshots[j], v.step(j));
  }
  return v;
}

ControlSignal ParabolicSystem::ObserveAdjoint(const StateField& terminal,
                                              StateField* initial) const {
  CheckState(terminal, "terminal dual state");
  ControlSignal v = ZeroControl();
  std::vector<double> work;
  StateField psi = terminal;
  for (int j = time_.nt - 1; j >= 0; --j) {
    adjoint_step_.Solve(psi, work);
    ObserveInto(psi, v.step(j));
  }
  if (initial) *initial = std::move(psi);
  return v;
}

Trajectory ForwardSolve(const Matrix& a_sys, const Matrix& b_sys,
                        const StateField& y0, const ControlSignal* control,
                        const SpatialGrid& grid, const TimeGrid& time,
                        const OmegaMask& mask) {
  return ParabolicSystem(a_sys, b_sys, grid, time, mask).Forward(y0, control);
}

Trajectory AdjointSolve(const Matrix& a_sys, const StateField& terminal,
                        const SpatialGrid& grid, const TimeGrid& time) {
  // The observation is not used here; any input matrix and a full mask do.
  OmegaMask full{{Interval{0.0, grid.length}},
                 std::vector<double>(grid.nx, 1.0)};
  return ParabolicSystem(a_sys, Matrix::Identity(a_sys.rows(), 1), grid,
                         time, std::move(full))
      .Adjoint(terminal);
}

ControlSignal Observe(const Trajectory& dual, const Matrix& b_sys,
                      const OmegaMask& mask, int nx) {
  ControlSignal v(dual.time, static_cast<int>(b_sys.cols()), nx, mask);
  for (int j = 0; j < dual.time.nt; ++j) {
    const StateField& psi = dual.snapshots[j];
    if (psi.k() != b_sys.rows() || psi.nx() != nx) {
      throw SyncError(ErrorCode::kInvalidDimension,
                      "dual snapshot does not match the input matrix");
    }
    for (int c = 0; c < b_sys.cols(); ++c) {
      for (int r = 0; r < b_sys.rows(); ++r) {
        const double coeff = b_sys(r, c);
        if (coeff == 0.0) continue;
        for (int i = 0; i < nx; ++i) v(j, c, i) += coeff * psi(r, i);
      }
      for (int i = 0; i < nx; ++i) v(j, c, i) *= mask.mask[i];
    }
  }
  return v;
}

StateField ApplyPointwise(const Matrix& m, const StateField& f) {
  if (m.cols() != f.k()) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "pointwise matrix columns do not match field components");
  }
  StateField out(static_cast<int>(m.rows()), f.nx());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (m(r, c) == 0.0) continue;
      simd::Axpy(m(r, c), f.component(c), out.component(r));
    }
  }
  return out;
}

}  // namespace syncctl
