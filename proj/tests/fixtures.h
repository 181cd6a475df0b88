#ifndef SYNCCTL_TESTS_FIXTURES_H_
#define SYNCCTL_TESTS_FIXTURES_H_

#include <cmath>
#include <initializer_list>
#include <random>

#include "syncctl/grid.h"
#include "syncctl/min_norm.h"
#include "syncctl/pde.h"
#include "syncctl/sync_algebra.h"

namespace syncctl::testing {

inline Matrix Mat(int rows, int cols, std::initializer_list<double> v) {
  Matrix m(rows, cols);
  auto it = v.begin();
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = *it++;
  return m;
}

// Equal row sums, rank(DB) = 1.
inline CouplingPair B4Pair() {
  return {Mat(2, 2, {1, 0, 0.5, 0.5}), Mat(2, 1, {0, 1})};
}

// Unequal row sums, rank(B, AB) = 2.
inline CouplingPair B5Pair() {
  return {Mat(2, 2, {1, 2, 3, 4}), Mat(2, 1, {0, 1})};
}

inline StateField SinModes(const SpatialGrid& g,
                           std::initializer_list<int> modes) {
  StateField f(static_cast<int>(modes.size()), g.nx);
  int c = 0;
  for (int k : modes) {
    for (int i = 0; i < g.nx; ++i) {
      f(c, i) = k == 0 ? 0.0 : std::sin(k * M_PI * g.x(i) / g.length);
    }
    ++c;
  }
  return f;
}

inline StateField RandomField(int k, int nx, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  StateField f(k, nx);
  for (double& v : f.values()) v = nd(rng);
  return f;
}

inline ControlSignal RandomControl(const ParabolicSystem& sys,
                                   std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  ControlSignal u = sys.ZeroControl();
  for (int j = 0; j < sys.time().nt; ++j)
    for (int c = 0; c < sys.m(); ++c)
      for (int i = 0; i < sys.grid().nx; ++i)
        if (sys.mask().mask[i] != 0.0) u(j, c, i) = nd(rng);
  return u;
}

inline double MaxAbsDiff(const StateField& a, const StateField& b) {
  return MaxAbs(a - b);
}

// The control instance used across the solver tests: ω = (0.3, 0.8),
// nx = 100, nt = 200 per horizon.
struct B4Instance {
  CouplingPair pair = B4Pair();
  SyncStructure structure = Classify(pair);
  SpatialGrid grid = BuildGrid(1.0, 100);
  OmegaMask mask = MakeOmegaMask(grid, {{0.3, 0.8}});
  StateField y0 = SinModes(grid, {1, 0});
  MinNormSolver solver{MakeOperatingSystem(pair, structure), grid, mask,
                       HumOptions{}};
};

struct B5Instance {
  CouplingPair pair = B5Pair();
  SyncStructure structure = Classify(pair);
  SpatialGrid grid = BuildGrid(1.0, 100);
  OmegaMask mask = MakeOmegaMask(grid, {{0.3, 0.8}});
  StateField y0 = SinModes(grid, {1, 2});
  MinNormSolver solver{MakeOperatingSystem(pair, structure), grid, mask,
                       HumOptions{}};
};

}  // namespace syncctl::testing

#endif  // SYNCCTL_TESTS_FIXTURES_H_
