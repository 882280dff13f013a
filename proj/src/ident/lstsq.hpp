#pragma once

#include <Eigen/Dense>

namespace koopflow {

/// Diagnostics of a truncated-SVD least-squares solve.
struct LstsqResult {
  Eigen::MatrixXd G;               ///< minimizer, rows(Y) x rows(X)
  Eigen::VectorXd singular_values; ///< full spectrum of X, descending
  int rank = 0;                    ///< singular values kept
  double sigma_max = 0.0;
  double sigma_min_kept = 0.0;     ///< smallest retained singular value
  bool degenerate = false;         ///< X numerically zero: G forced to zero
};

/// Minimum-norm solution of min_G ||Y - G X||_F via SVD pseudoinverse.
/// Singular values at or below rel_tol * sigma_max are truncated. A zero or
/// fully truncated X yields G = 0 with the degenerate flag set.
LstsqResult solve_least_squares(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X,
                                double rel_tol);

}  // namespace koopflow
