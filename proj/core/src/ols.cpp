#include <cmath>
#include <string>

#include "demotrend/econometrics.hpp"

namespace demotrend::econ {

OlsResult ols(const VectorXd& y, const MatrixXd& X, bool intercept) {
  const auto n = y.size();
  const auto k = X.cols() + (intercept ? 1 : 0);
  if (X.rows() != n) {
    throw Error(ErrorCode::InvalidArgument, "ols: X has " + std::to_string(X.rows()) +
                                                " rows but y has " + std::to_string(n));
  }
  if (k == 0 || n <= k) {
    throw Error(ErrorCode::InvalidArgument, "ols: need more observations (" + std::to_string(n) +
                                                ") than parameters (" + std::to_string(k) + ")");
  }
  if (!y.allFinite() || !X.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "ols: non-finite input");
  }

  MatrixXd design(n, k);
  design.leftCols(X.cols()) = X;
  if (intercept) design.col(k - 1).setOnes();

  Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
  qr.setThreshold(1e-11);
  if (qr.rank() < k) {
    // The first pivot past the rank names a column that is (numerically) a
    // combination of the others.
    const auto col = qr.colsPermutation().indices()(qr.rank());
    const std::string name =
        intercept && col == k - 1 ? std::string("intercept") : "column " + std::to_string(col);
    throw Error(ErrorCode::RankDeficient, "ols: design matrix is rank deficient (rank " +
                                              std::to_string(qr.rank()) + " of " +
                                              std::to_string(k) + "); " + name +
                                              " is collinear with the others");
  }

  OlsResult r;
  r.coefficients = qr.solve(y);
  r.residuals = y - design * r.coefficients;
  r.ssr = r.residuals.squaredNorm();
  r.n_obs = static_cast<std::size_t>(n);
  r.n_params = static_cast<std::size_t>(k);
  r.intercept = intercept;

  const double dof = static_cast<double>(n - k);
  const double sigma2 = r.ssr / dof;
  r.rmse = std::sqrt(sigma2);

  const MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const MatrixXd r_inv =
      R.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(k, k));
  const MatrixXd xtx_inv_perm = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const MatrixXd xtx_inv = perm * xtx_inv_perm * perm.transpose();
  r.std_errors = (sigma2 * xtx_inv.diagonal()).cwiseSqrt();
  r.t_stats = r.coefficients.cwiseQuotient(r.std_errors);

  const double sst = intercept ? (y.array() - y.mean()).square().sum() : y.squaredNorm();
  r.r_squared = sst > 0.0 ? 1.0 - r.ssr / sst : 1.0;
  return r;
}

}  // namespace demotrend::econ
