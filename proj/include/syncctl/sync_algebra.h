#ifndef SYNCCTL_SYNC_ALGEBRA_H_
#define SYNCCTL_SYNC_ALGEBRA_H_

// Finite-dimensional structure of the coupled system y_t - Δy + Ay = χ_ω B u:
// the difference matrix D, the reduced coupling Ã with DA = ÃD, Kalman ranks,
// and the three-way synchronizability classification.

#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace syncctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kRowConditionTol = 1e-10;
inline constexpr double kRankRelativeTol = 1e-10;
inline constexpr double kRankAbsoluteFloor = 1e-14;

struct CouplingPair {
  Matrix a;  // n x n
  Matrix b;  // n x m

  int n() const { return static_cast<int>(a.rows()); }
  int m() const { return static_cast<int>(b.cols()); }
};

// Throws InvalidDimension unless n >= 2, m >= 1, shapes agree and all entries
// are finite.
void Validate(const CouplingPair& pair);

enum class Hypothesis { kH1, kH2, kNeither };

std::string_view HypothesisName(Hypothesis h);

struct RankResult {
  int rank = 0;
  // Singular value closest to the cutoff, and the cutoff itself. Used to flag
  // borderline rank decisions.
  double decisive_sigma = 0.0;
  double cutoff = 0.0;
  bool near_cutoff = false;
};

struct SyncStructure {
  Matrix d;
  Hypothesis hypothesis = Hypothesis::kNeither;
  std::optional<Matrix> a_reduced;
  int rank_value = 0;
  int rank_target = 0;
  bool rank_near_cutoff = false;
  Vector row_sums;
  bool row_condition = false;
};

// (n-1) x n bidiagonal matrix with 1 on the diagonal and -1 above it.
Matrix DifferenceMatrix(int n);

bool RowCondition(const Matrix& a, double tol = kRowConditionTol);

// Unique Ã with ÃD = DA. Throws RowConditionViolated if A has unequal row sums.
Matrix ReducedMatrix(const Matrix& a, double tol = kRowConditionTol);

// Rank of [G, FG, ..., F^{k-1}G] for k = rows(F), counted by singular values.
RankResult KalmanRank(const Matrix& f, const Matrix& g,
                      double rel_tol = kRankRelativeTol);

SyncStructure Classify(const CouplingPair& pair,
                       double row_tol = kRowConditionTol,
                       double rank_tol = kRankRelativeTol);

}  // namespace syncctl

#endif  // SYNCCTL_SYNC_ALGEBRA_H_
