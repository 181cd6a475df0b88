#ifndef SYNCCTL_GRID_H_
#define SYNCCTL_GRID_H_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace syncctl {

// Uniform grid of the interior nodes x_i = i*dx, i = 1..nx, of (0, length).
// Homogeneous Dirichlet values at both endpoints are implied.
struct SpatialGrid {
  double length = 1.0;
  int nx = 0;
  double dx = 0.0;

  double x(int i) const { return (i + 1) * dx; }  // zero-based node index
};

SpatialGrid BuildGrid(double length, int nx);

struct TimeGrid {
  double horizon = 0.0;
  int nt = 0;
  double dt = 0.0;

  double t(int j) const { return j * dt; }
};

TimeGrid BuildTimeGrid(double horizon, int nt);

struct Interval {
  double a = 0.0;
  double b = 0.0;
};

struct OmegaMask {
  std::vector<Interval> intervals;
  std::vector<double> mask;  // 1.0 inside ω, 0.0 outside

  int active_count() const;
};

// Throws EmptyControlRegion when no node lies strictly inside an interval.
OmegaMask MakeOmegaMask(const SpatialGrid& grid,
                        std::vector<Interval> intervals);

// k spatial profiles stored component-major: values[c * nx + i].
class StateField {
 public:
  StateField() = default;
  StateField(int k, int nx) : k_(k), nx_(nx), values_(std::size_t(k) * nx) {}

  int k() const { return k_; }
  int nx() const { return nx_; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<double> component(int c) {
    return std::span<double>(values_).subspan(std::size_t(c) * nx_, nx_);
  }
  std::span<const double> component(int c) const {
    return std::span<const double>(values_).subspan(std::size_t(c) * nx_, nx_);
  }
  double& operator()(int c, int i) { return values_[std::size_t(c) * nx_ + i]; }
  double operator()(int c, int i) const {
    return values_[std::size_t(c) * nx_ + i];
  }

  bool IsZero() const;

  StateField& operator+=(const StateField& other);
  StateField& operator-=(const StateField& other);
  StateField& operator*=(double s);

 private:
  int k_ = 0;
  int nx_ = 0;
  std::vector<double> values_;
};

StateField operator+(StateField a, const StateField& b);
StateField operator-(StateField a, const StateField& b);
StateField operator*(double s, StateField a);

// dx * sum_i f_i g_i, summed over components.
double Inner(const StateField& f, const StateField& g, double dx);
double Norm(const StateField& f, double dx);
double MaxAbs(const StateField& f);

struct Trajectory {
  TimeGrid time;
  std::vector<StateField> snapshots;  // nt + 1 entries, t_0 .. t_nt
};

// Piecewise constant in time: step j (0-based) holds the value on
// (t_j, t_{j+1}]. Values are laid out [step][component][node]. Zero after the
// horizon.
class ControlSignal {
 public:
  ControlSignal() = default;
  ControlSignal(TimeGrid time, int m, int nx, OmegaMask support)
      : time_(time),
        m_(m),
        nx_(nx),
        support_(std::move(support)),
        values_(std::size_t(time.nt) * m * nx) {}

  const TimeGrid& time() const { return time_; }
  int m() const { return m_; }
  int nx() const { return nx_; }
  const OmegaMask& support() const { return support_; }

  std::span<double> step(int j) {
    return std::span<double>(values_).subspan(std::size_t(j) * m_ * nx_,
                                              std::size_t(m_) * nx_);
  }
  std::span<const double> step(int j) const {
    return std::span<const double>(values_).subspan(std::size_t(j) * m_ * nx_,
                                                    std::size_t(m_) * nx_);
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double operator()(int j, int c, int i) const {
    return values_[(std::size_t(j) * m_ + c) * nx_ + i];
  }
  double& operator()(int j, int c, int i) {
    return values_[(std::size_t(j) * m_ + c) * nx_ + i];
  }

  // dt * dx * sum of squares.
  double SquaredNorm(double dx) const;
  double Norm(double dx) const;
  // True when every value at a node outside ω is exactly zero.
  bool RespectsSupport() const;

 private:
  TimeGrid time_;
  int m_ = 0;
  int nx_ = 0;
  OmegaMask support_;
  std::vector<double> values_;
};

// dt * dx * sum over steps, components and nodes.
double Inner(const ControlSignal& u, const ControlSignal& v, double dx);

}  // namespace syncctl

#endif  // SYNCCTL_GRID_H_
