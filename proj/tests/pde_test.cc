#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.h"
#include "syncctl/pde.h"

namespace syncctl {
namespace {

using testing::B4Pair;
using testing::B5Pair;
using testing::Mat;
using testing::RandomControl;
using testing::RandomField;
using testing::SinModes;

// Eigenvalue of tridiag(-1, 2, -1) / dx^2 for sin(k pi x / L).
double DiscreteEigenvalue(const SpatialGrid& g, int k) {
  const double s = std::sin(k * M_PI * g.dx / (2.0 * g.length));
  return 4.0 / (g.dx * g.dx) * s * s;
}

double RelMaxError(const StateField& got, const StateField& want) {
  return MaxAbs(got - want) / MaxAbs(want);
}

TEST(Forward, ZeroStaysZero) {
  const SpatialGrid g = BuildGrid(1.0, 20);
  const ParabolicSystem sys(B5Pair().a, B5Pair().b, g, BuildTimeGrid(1.0, 10),
                            MakeOmegaMask(g, {{0.2, 0.6}}));
  const Trajectory tr = sys.Forward(sys.ZeroState(), nullptr);
  ASSERT_EQ(tr.snapshots.size(), 11u);
  for (const auto& s : tr.snapshots) EXPECT_TRUE(s.IsZero());
}

// Implicit Euler maps the eigenvector sin(k pi x) to itself scaled by
// 1 / (1 + dt (mu_k + a)) per step, where mu_k is the discrete eigenvalue.
TEST(Forward, MatchesDiscreteEigenvectorRecursion) {
  const SpatialGrid g = BuildGrid(1.0, 60);
  const double a = 1.0;
  const TimeGrid t = BuildTimeGrid(0.5, 50);
  const ParabolicSystem sys(a * Matrix::Identity(2, 2), Mat(2, 1, {1, 0}), g,
                            t, MakeOmegaMask(g, {{0.1, 0.9}}));
  const StateField y0 = SinModes(g, {1, 3});
  const StateField yT = sys.ForwardFinal(y0, nullptr);
  for (int c = 0; c < 2; ++c) {
    const int k = c == 0 ? 1 : 3;
    const double factor =
        std::pow(1.0 + t.dt * (DiscreteEigenvalue(g, k) + a), -t.nt);
    for (int i = 0; i < g.nx; ++i) {
      EXPECT_NEAR(yT(c, i), factor * y0(c, i), 1e-13);
    }
  }
}

// Error against the continuum solution with time discretization held
// fixed: the reference is the per-step factor applied to the continuous
// eigenvalue, so what remains is the spatial error.
double SpatialError(int nx, int nt) {
  const SpatialGrid g = BuildGrid(1.0, nx);
  const double a = 1.0, horizon = 0.5;
  const TimeGrid t = BuildTimeGrid(horizon, nt);
  const ParabolicSystem sys(Mat(1, 1, {a}), Mat(1, 1, {1}), g, t,
                            MakeOmegaMask(g, {{0.0, 1.0}}));
  const StateField y0 = SinModes(g, {1});
  const double factor = std::pow(1.0 + t.dt * (M_PI * M_PI + a), -nt);
  return RelMaxError(sys.ForwardFinal(y0, nullptr), factor * y0);
}

// Error against the semi-discrete solution exp(-(mu + a) T): time error only.
double TemporalError(int nx, int nt) {
  const SpatialGrid g = BuildGrid(1.0, nx);
  const double a = 1.0, horizon = 0.5;
  const TimeGrid t = BuildTimeGrid(horizon, nt);
  const ParabolicSystem sys(Mat(1, 1, {a}), Mat(1, 1, {1}), g, t,
                            MakeOmegaMask(g, {{0.0, 1.0}}));
  const StateField y0 = SinModes(g, {1});
  const double factor = std::exp(-(DiscreteEigenvalue(g, 1) + a) * horizon);
  return RelMaxError(sys.ForwardFinal(y0, nullptr), factor * y0);
}

TEST(Forward, SecondOrderInSpace) {
  const double coarse = SpatialError(49, 400);
  const double fine = SpatialError(99, 400);
  const double order = std::log2(coarse / fine);
  EXPECT_GE(order, 1.7) << coarse << " " << fine;
  EXPECT_LE(order, 2.3) << coarse << " " << fine;
}

TEST(Forward, FirstOrderInTime) {
  const double coarse = TemporalError(50, 200);
  const double fine = TemporalError(50, 400);
  EXPECT_GE(coarse / fine, 1.8);
  EXPECT_LE(coarse / fine, 2.2);
}

TEST(Forward, LinearInDataAndControl) {
  std::mt19937_64 rng(3);
  const SpatialGrid g = BuildGrid(1.0, 40);
  const CouplingPair p = B5Pair();
  const ParabolicSystem sys(p.a, p.b, g, BuildTimeGrid(0.7, 30),
                            MakeOmegaMask(g, {{0.25, 0.55}}));
  for (int trial = 0; trial < 5; ++trial) {
    const StateField y1 = RandomField(2, g.nx, rng);
    const StateField y2 = RandomField(2, g.nx, rng);
    const ControlSignal u1 = RandomControl(sys, rng);
    const ControlSignal u2 = RandomControl(sys, rng);
    ControlSignal u12 = u1;
    for (std::size_t i = 0; i < u12.values().size(); ++i)
      u12.values()[i] += u2.values()[i];
    const Trajectory sum = sys.Forward(y1 + y2, &u12);
    const Trajectory t1 = sys.Forward(y1, &u1);
    const Trajectory t2 = sys.Forward(y2, &u2);
    for (std::size_t j = 0; j < sum.snapshots.size(); ++j) {
      const StateField parts = t1.snapshots[j] + t2.snapshots[j];
      EXPECT_LE(MaxAbs(sum.snapshots[j] - parts),
                1e-12 * std::max(1.0, MaxAbs(parts)));
    }
  }
}

TEST(Forward, UnforcedEnergyDecay) {
  std::mt19937_64 rng(9);
  const SpatialGrid g = BuildGrid(1.0, 50);
  for (double a : {0.0, 0.3, 2.0}) {
    const ParabolicSystem sys(a * Matrix::Identity(3, 3), Matrix::Zero(3, 1),
                              g, BuildTimeGrid(0.4, 40),
                              MakeOmegaMask(g, {{0.0, 1.0}}));
    const Trajectory tr = sys.Forward(RandomField(3, g.nx, rng), nullptr);
    for (std::size_t j = 1; j < tr.snapshots.size(); ++j) {
      EXPECT_LE(Norm(tr.snapshots[j], g.dx), Norm(tr.snapshots[j - 1], g.dx));
    }
  }
}

TEST(Forward, SynchronizedSetIsInvariant) {
  const SpatialGrid g = BuildGrid(1.0, 50);
  const CouplingPair p = B4Pair();
  const ParabolicSystem sys(p.a, p.b, g, BuildTimeGrid(1.0, 50),
                            MakeOmegaMask(g, {{0.3, 0.8}}));
  StateField y0(2, g.nx);
  for (int i = 0; i < g.nx; ++i) y0(0, i) = y0(1, i) = std::sin(M_PI * g.x(i));
  const Matrix d = DifferenceMatrix(2);
  const Trajectory tr = sys.Forward(y0, nullptr);
  for (const auto& s : tr.snapshots) {
    EXPECT_LE(MaxAbs(ApplyPointwise(d, s)), 1e-12 * MaxAbs(s) + 1e-300);
  }
}

// D y(t; y0, u) = z(t; D y0, u) where z runs the reduced system.
TEST(Forward, CommutesWithDifferenceMatrix) {
  std::mt19937_64 rng(17);
  const SpatialGrid g = BuildGrid(1.0, 45);
  const TimeGrid t = BuildTimeGrid(0.8, 40);
  const OmegaMask m = MakeOmegaMask(g, {{0.1, 0.4}, {0.6, 0.7}});
  Matrix a = Mat(3, 3, {1, 2, -0.5, 0.3, 0.7, 1.5, -1, 2, 1.5});
  const Matrix b = Mat(3, 2, {1, 0, 0, 1, 0.5, -1});
  const Matrix d = DifferenceMatrix(3);
  const ParabolicSystem full(a, b, g, t, m);
  const ParabolicSystem reduced(ReducedMatrix(a), d * b, g, t, m);
  const StateField y0 = RandomField(3, g.nx, rng);
  const ControlSignal u = RandomControl(full, rng);
  const Trajectory ty = full.Forward(y0, &u);
  const Trajectory tz = reduced.Forward(ApplyPointwise(d, y0), &u);
  for (std::size_t j = 0; j < ty.snapshots.size(); ++j) {
    const StateField dy = ApplyPointwise(d, ty.snapshots[j]);
    EXPECT_LE(MaxAbs(dy - tz.snapshots[j]), 1e-12 * MaxAbs(dy));
  }
}

TEST(Adjoint, ZeroAndEigenvector) {
  const SpatialGrid g = BuildGrid(1.0, 30);
  const TimeGrid t = BuildTimeGrid(0.6, 60);
  const double a = 0.5;
  const Trajectory zero = AdjointSolve(Mat(1, 1, {a}), StateField(1, g.nx), g, t);
  for (const auto& s : zero.snapshots) EXPECT_TRUE(s.IsZero());

  const StateField psi_t = SinModes(g, {1});
  const Trajectory tr = AdjointSolve(Mat(1, 1, {a}), psi_t, g, t);
  const double step = 1.0 / (1.0 + t.dt * (DiscreteEigenvalue(g, 1) + a));
  for (int j = 0; j <= t.nt; ++j) {
    const double factor = std::pow(step, t.nt - j);
    EXPECT_LE(MaxAbs(tr.snapshots[j] - factor * psi_t), 1e-13);
  }
  // and against the continuum solution exp(-(pi^2 + a)(T - t))
  // and, on a fine time grid, against exp(-(pi^2 + a)(T - t))
  const TimeGrid fine = BuildTimeGrid(0.6, 6000);
  const Trajectory tf = AdjointSolve(Mat(1, 1, {a}), psi_t, g, fine);
  const double exact = std::exp(-(M_PI * M_PI + a) * fine.horizon);
  EXPECT_LE(RelMaxError(tf.snapshots[0], exact * psi_t), 0.01);
}

TEST(Observe, IdentityAndReducedInput) {
  const SpatialGrid g = BuildGrid(1.0, 20);
  const TimeGrid t = BuildTimeGrid(0.3, 6);
  std::mt19937_64 rng(1);
  const StateField psi_t = RandomField(2, g.nx, rng);
  const Matrix a = Mat(2, 2, {0.2, 0.1, -0.3, 0.4});
  const Trajectory dual = AdjointSolve(a, psi_t, g, t);
  const OmegaMask all = MakeOmegaMask(g, {{0.0, 1.0}});
  const ControlSignal v = Observe(dual, Matrix::Identity(2, 2), all, g.nx);
  for (int j = 0; j < t.nt; ++j)
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < g.nx; ++i) EXPECT_EQ(v(j, c, i), dual.snapshots[j](c, i));

  // (b4): B_sys = D B = [-1]
  const CouplingPair p = B4Pair();
  const Matrix db = DifferenceMatrix(2) * p.b;
  ASSERT_EQ(db(0, 0), -1.0);
  const OmegaMask w = MakeOmegaMask(g, {{0.3, 0.8}});
  const Trajectory dual1 =
      AdjointSolve(Mat(1, 1, {0.5}), RandomField(1, g.nx, rng), g, t);
  const ControlSignal v1 = Observe(dual1, db, w, g.nx);
  for (int j = 0; j < t.nt; ++j)
    for (int i = 0; i < g.nx; ++i)
      EXPECT_EQ(v1(j, 0, i), -w.mask[i] * dual1.snapshots[j](0, i));

  const ControlSignal v0 =
      Observe(AdjointSolve(a, StateField(2, g.nx), g, t), Mat(2, 1, {1, 2}),
              w, g.nx);
  for (double x : v0.values()) EXPECT_EQ(x, 0.0);
}

void CheckDuality(const Matrix& a, const Matrix& b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const SpatialGrid g = BuildGrid(1.0, 60);
  const ParabolicSystem sys(a, b, g, BuildTimeGrid(0.9, 45),
                            MakeOmegaMask(g, {{0.3, 0.8}}));
  for (int trial = 0; trial < 10; ++trial) {
    const StateField psi_t = RandomField(sys.k(), g.nx, rng);
    const ControlSignal v = RandomControl(sys, rng);
    const StateField z = sys.ForwardFinal(sys.ZeroState(), &v);
    const ControlSignal obs = sys.ObserveAdjoint(psi_t);
    const double lhs = Inner(psi_t, z, g.dx);
    const double rhs = Inner(v, obs, g.dx);
    const double scale = Norm(psi_t, g.dx) * Norm(z, g.dx) +
                         v.Norm(g.dx) * obs.Norm(g.dx);
    EXPECT_LE(std::abs(lhs - rhs), 1e-12 * scale) << lhs << " vs " << rhs;
  }
}

TEST(Adjoint, DiscreteDualityReduced) {
  const CouplingPair p = B4Pair();
  CheckDuality(Mat(1, 1, {0.5}), DifferenceMatrix(2) * p.b, 21);
}

TEST(Adjoint, DiscreteDualityFull) {
  CheckDuality(B5Pair().a, B5Pair().b, 22);
  CheckDuality(Mat(3, 3, {1, -2, 0.5, 3, 0, 1, -1, 1, 2}),
               Mat(3, 2, {1, 0, 0, 1, 1, 1}), 23);
}

TEST(Adjoint, ObserveAdjointMatchesTrajectoryRoute) {
  std::mt19937_64 rng(4);
  const SpatialGrid g = BuildGrid(1.0, 25);
  const CouplingPair p = B5Pair();
  const ParabolicSystem sys(p.a, p.b, g, BuildTimeGrid(0.5, 20),
                            MakeOmegaMask(g, {{0.3, 0.8}}));
  const StateField psi_t = RandomField(2, g.nx, rng);
  StateField psi0;
  const ControlSignal fast = sys.ObserveAdjoint(psi_t, &psi0);
  const Trajectory dual = sys.Adjoint(psi_t);
  const ControlSignal slow = sys.Observe(dual);
  for (std::size_t i = 0; i < fast.values().size(); ++i)
    EXPECT_EQ(fast.values()[i], slow.values()[i]);
  EXPECT_EQ(MaxAbs(psi0 - dual.snapshots.front()), 0.0);
}

TEST(StepOperator, StrongCouplingStillSolves) {
  const SpatialGrid g = BuildGrid(1.0, 10);
  const ParabolicSystem sys(Mat(2, 2, {100, -250, 40, 7}), Mat(2, 1, {1, 1}),
                            g, BuildTimeGrid(1.0, 5),
                            MakeOmegaMask(g, {{0.0, 1.0}}));
  std::mt19937_64 rng(2);
  const StateField y = sys.ForwardFinal(RandomField(2, g.nx, rng), nullptr);
  for (double v : y.values()) EXPECT_TRUE(std::isfinite(v));
}

}  // namespace
}  // namespace syncctl
