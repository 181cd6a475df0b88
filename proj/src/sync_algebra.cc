#include "syncctl/sync_algebra.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "syncctl/errors.h"

namespace syncctl {

std::string_view HypothesisName(Hypothesis h) {
  switch (h) {
    case Hypothesis::kH1: return "H1";
    case Hypothesis::kH2: return "H2";
    case Hypothesis::kNeither: return "Neither";
  }
  return "Neither";
}

void Validate(const CouplingPair& pair) {
  if (pair.a.rows() < 2 || pair.a.rows() != pair.a.cols()) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "A must be square with n >= 2, got " +
                        std::to_string(pair.a.rows()) + "x" +
                        std::to_string(pair.a.cols()));
  }
  if (pair.b.rows() != pair.a.rows() || pair.b.cols() < 1) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "B must be n x m with m >= 1, got " +
                        std::to_string(pair.b.rows()) + "x" +
                        std::to_string(pair.b.cols()));
  }
  if (!pair.a.allFinite() || !pair.b.allFinite()) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "coupling matrices contain non-finite entries");
  }
}

Matrix DifferenceMatrix(int n) {
  if (n < 2) {
    throw SyncError(ErrorCode::kInvalidDimension,
                    "difference matrix needs n >= 2, got " + std::to_string(n));
  }
  Matrix d = Matrix::Zero(n - 1, n);
  for (int i = 0; i < n - 1; ++i) {
    d(i, i) = 1.0;
    d(i, i + 1) = -1.0;
  }
  return d;
}

bool RowCondition(const Matrix& a, double tol) {
  const Vector sums = a.rowwise().sum();
  const double spread = sums.maxCoeff() - sums.minCoeff();
  return spread <= tol * (1.0 + sums.cwiseAbs().maxCoeff());
}

Matrix ReducedMatrix(const Matrix& a, double tol) {
  if (!RowCondition(a, tol)) {
    throw SyncError(ErrorCode::kRowConditionViolated,
                    "row sums of A differ; no Ã with DA = ÃD exists");
  }
  const int n = static_cast<int>(a.rows());
  // Right inverse of D: R(i, j) = 1 for i <= j, so DR = I. Then Ã = DAR.
  Matrix r = Matrix::Zero(n, n - 1);
  for (int j = 0; j < n - 1; ++j) {
    for (int i = 0; i <= j; ++i) r(i, j) = 1.0;
  }
  const Matrix d = DifferenceMatrix(n);
  return d * a * r;
}

RankResult KalmanRank(const Matrix& f, const Matrix& g, double rel_tol) {
  const Eigen::Index k = f.rows();
  const Eigen::Index l = g.cols();
  Matrix block(k, k * l);
  Matrix power = g;
  for (Eigen::Index p = 0; p < k; ++p) {
    block.middleCols(p * l, l) = power;
    power = f * power;
  }

  RankResult out;
  if (block.size() == 0) return out;
  Eigen::JacobiSVD<Matrix> svd(block);
  const Vector& sigma = svd.singularValues();
  const double sigma_max = sigma.size() > 0 ? sigma(0) : 0.0;
  if (sigma_max <= kRankAbsoluteFloor) {
    out.cutoff = kRankAbsoluteFloor;
    return out;
  }
  out.cutoff = rel_tol * sigma_max;
  double closest_log_gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > out.cutoff) ++out.rank;
    const double gap =
        std::abs(std::log10(std::max(sigma(i), 1e-300) / out.cutoff));
    if (gap < closest_log_gap) {
      closest_log_gap = gap;
      out.decisive_sigma = sigma(i);
    }
  }
  out.near_cutoff = closest_log_gap < 1.0;
  return out;
}

SyncStructure Classify(const CouplingPair& pair, double row_tol,
                       double rank_tol) {
  Validate(pair);
  const int n = pair.n();
  SyncStructure s;
  s.d = DifferenceMatrix(n);
  s.row_sums = pair.a.rowwise().sum();
  s.row_condition = RowCondition(pair.a, row_tol);

  if (s.row_condition) {
    s.a_reduced = ReducedMatrix(pair.a, row_tol);
    const RankResult r = KalmanRank(*s.a_reduced, s.d * pair.b, rank_tol);
    s.rank_value = r.rank;
    s.rank_target = n - 1;
    s.rank_near_cutoff = r.near_cutoff;
    s.hypothesis = r.rank == n - 1 ? Hypothesis::kH1 : Hypothesis::kNeither;
  } else {
    const RankResult r = KalmanRank(pair.a, pair.b, rank_tol);
    s.rank_value = r.rank;
    s.rank_target = n;
    s.rank_near_cutoff = r.near_cutoff;
    s.hypothesis = r.rank == n ? Hypothesis::kH2 : Hypothesis::kNeither;
  }
  return s;
}

}  // namespace syncctl
