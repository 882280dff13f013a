#include "ident/lstsq.hpp"

#include "core/error.hpp"

namespace koopflow {

LstsqResult solve_least_squares(const Eigen::MatrixXd& Y, const Eigen::MatrixXd& X,
                                double rel_tol) {
  require(X.rows() > 0 && X.cols() > 0, "regressor matrix must be non-empty");
  require(Y.cols() == X.cols(), "Y and X must share the snapshot count");
  require(rel_tol > 0.0 && rel_tol < 1.0, "rel_tol must lie in (0, 1)");
  require(X.allFinite() && Y.allFinite(), "regression data must be finite");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  LstsqResult out;
  out.singular_values = svd.singularValues();
  out.sigma_max = out.singular_values.size() > 0 ? out.singular_values(0) : 0.0;

  const double threshold = rel_tol * out.sigma_max;
  int rank = 0;
  while (rank < out.singular_values.size() && out.singular_values(rank) > threshold) ++rank;
  out.rank = rank;

  if (rank == 0) {
    out.G = Eigen::MatrixXd::Zero(Y.rows(), X.rows());
    out.degenerate = true;
    return out;
  }
  out.sigma_min_kept = out.singular_values(rank - 1);

  // G = Y X^+ = (Y V_r) diag(1/sigma) U_r^T, keeping only the retained modes.
  const Eigen::MatrixXd yv = Y * svd.matrixV().leftCols(rank);
  out.G = yv * out.singular_values.head(rank).cwiseInverse().asDiagonal() *
          svd.matrixU().leftCols(rank).transpose();
  return out;
}

}  // namespace koopflow
