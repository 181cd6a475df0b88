#include "syncctl/grid.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "syncctl/errors.h"
#include "syncctl/simd/kernels.h"

namespace syncctl {

SpatialGrid BuildGrid(double length, int nx) {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw SyncError(ErrorCode::kInvalidDimension, "domain length must be > 0");
  }
  if (nx < 3) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "need nx >= 3 interior nodes, got " + std::to_string(nx));
  }
  return SpatialGrid{length, nx, length / (nx + 1)};
}

TimeGrid BuildTimeGrid(double horizon, int nt) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw SyncError(ErrorCode::kInvalidDimension, "time horizon must be > 0");
  }
  if (nt < 1) {
    throw SyncError(ErrorCode::kInvalidDimension, "need nt >= 1");
  }
  return TimeGrid{horizon, nt, horizon / nt};
}

int OmegaMask::active_count() const {
  return static_cast<int>(std::count(mask.begin(), mask.end(), 1.0));
}

OmegaMask MakeOmegaMask(const SpatialGrid& grid,
                        std::vector<Interval> intervals) {
  OmegaMask out;
  out.mask.assign(grid.nx, 0.0);
  for (const Interval& iv : intervals) {
    if (!(iv.a < iv.b) || iv.a < 0.0 || iv.b > grid.length) {
      throw SyncError(ErrorCode::kValidationError,
                      "control interval must satisfy 0 <= a < b <= length");
    }
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i);
      if (x > iv.a && x < iv.b) out.mask[i] = 1.0;
    }
  }
  out.intervals = std::move(intervals);
  if (out.active_count() == 0) {
    throw SyncError(ErrorCode::kEmptyControlRegion,
                    "no grid node lies inside the control region");
  }
  return out;
}

bool StateField::IsZero() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v == 0.0; });
}

StateField& StateField::operator+=(const StateField& other) {
  simd::Axpy(1.0, other.values(), values());
  return *this;
}

StateField& StateField::operator-=(const StateField& other) {
  simd::Axpy(-1.0, other.values(), values());
  return *this;
}

StateField& StateField::operator*=(double s) {
  simd::Scale(s, values());
  return *this;
}

StateField operator+(StateField a, const StateField& b) { return a += b; }
StateField operator-(StateField a, const StateField& b) { return a -= b; }
StateField operator*(double s, StateField a) { return a *= s; }

double Inner(const StateField& f, const StateField& g, double dx) {
  return dx * simd::Dot(f.values(), g.values());
}

double Norm(const StateField& f, double dx) {
  return std::sqrt(dx * simd::SumSquares(f.values()));
}

double MaxAbs(const StateField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double ControlSignal::SquaredNorm(double dx) const {
  return time_.dt * dx * simd::SumSquares(values_);
}

double ControlSignal::Norm(double dx) const {
  return std::sqrt(SquaredNorm(dx));
}

bool ControlSignal::RespectsSupport() const {
  for (int j = 0; j < time_.nt; ++j) {
    for (int c = 0; c < m_; ++c) {
      for (int i = 0; i < nx_; ++i) {
        if (support_.mask[i] == 0.0 && (*this)(j, c, i) != 0.0) return false;
      }
    }
  }
  return true;
}

double Inner(const ControlSignal& u, const ControlSignal& v, double dx) {
  return u.time().dt * dx * simd::Dot(u.values(), v.values());
}

}  // namespace syncctl
