#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>

#include "demotrend/econometrics.hpp"

namespace demotrend::econ {

namespace {

void check_system(const MatrixXd& y, int max_lag, std::string_view op) {
  if (max_lag < 0) {
    throw Error(ErrorCode::InvalidArgument, std::string(op) + ": lag must be >= 0");
  }
  if (y.cols() < 1) throw Error(ErrorCode::InvalidArgument, std::string(op) + ": empty system");
  if (y.rows() <= 2 * max_lag + 20) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(op) + ": " + std::to_string(y.rows()) +
                    " observations too few for lag " + std::to_string(max_lag) +
                    " (need > 2 * lag + 20)");
  }
  if (!y.allFinite()) throw Error(ErrorCode::InvalidArgument, std::string(op) + ": non-finite data");
  // A singular sample covariance makes every residual covariance singular.
  const MatrixXd centered = y.rowwise() - y.colwise().mean();
  const MatrixXd cov = centered.transpose() * centered;
  const Eigen::VectorXd d = cov.diagonal();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d(i) > 0.0)) {
      throw Error(ErrorCode::Singular,
                  std::string(op) + ": variable " + std::to_string(i) + " has zero variance");
    }
  }
  const MatrixXd corr = d.cwiseSqrt().cwiseInverse().asDiagonal() * cov *
                        d.cwiseSqrt().cwiseInverse().asDiagonal();
  if (corr.determinant() < 1e-10) {
    throw Error(ErrorCode::Singular,
                std::string(op) + ": residual covariance is singular (variables are collinear)");
  }
}

// Rows t = first..T-1; columns y_{t-1}, ..., y_{t-lag} (K each).
MatrixXd lagged(const MatrixXd& y, Eigen::Index first, int lag) {
  const Eigen::Index K = y.cols();
  const Eigen::Index n = y.rows() - first;
  MatrixXd X(n, K * lag);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int j = 1; j <= lag; ++j) X.block(i, K * (j - 1), 1, K) = y.row(first + i - j);
  }
  return X;
}

double log_det_spd(const MatrixXd& s, std::string_view op) {
  Eigen::LLT<MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::Singular, std::string(op) + ": residual covariance is singular");
  }
  const double ld = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  if (!std::isfinite(ld)) {
    throw Error(ErrorCode::Singular, std::string(op) + ": residual covariance is singular");
  }
  return ld;
}

}  // namespace

LagSelection lag_select(const MatrixXd& y, int max_lag) {
  check_system(y, max_lag, "lag_select");
  const Eigen::Index K = y.cols();
  const Eigen::Index first = max_lag;
  const Eigen::Index n = y.rows() - first;
  const double T = static_cast<double>(n);
  const double k = static_cast<double>(K);
  const MatrixXd Y = y.bottomRows(n);

  LagSelection out;
  out.n_obs = static_cast<std::size_t>(n);
  for (int p = 0; p <= max_lag; ++p) {
    MatrixXd X(n, K * p + 1);
    X.leftCols(K * p) = lagged(y, first, p);
    X.col(K * p).setOnes();
    Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
    qr.setThreshold(1e-11);
    if (qr.rank() < X.cols()) {
      throw Error(ErrorCode::Singular, "lag_select: VAR design at lag " + std::to_string(p) +
                                           " is rank deficient");
    }
    const MatrixXd resid = Y - X * qr.solve(Y);
    const MatrixXd sigma = resid.transpose() * resid / T;
    const double ld = log_det_spd(sigma, "lag_select");

    LagRow row;
    row.lag = p;
    row.log_likelihood = -0.5 * T * (k * std::log(2.0 * std::numbers::pi) + k + ld);
    const double params = k * (k * p + 1.0);
    row.fpe = std::exp(ld) * std::pow((T + k * p + 1.0) / (T - k * p - 1.0), k);
    row.aic = -2.0 * row.log_likelihood / T + 2.0 * params / T;
    row.hqic = -2.0 * row.log_likelihood / T + 2.0 * std::log(std::log(T)) * params / T;
    row.sbic = -2.0 * row.log_likelihood / T + std::log(T) * params / T;
    if (p > 0) {
      row.lr = 2.0 * (row.log_likelihood - out.rows.back().log_likelihood);
      row.lr_df = static_cast<int>(K * K);
      boost::math::chi_squared chi(row.lr_df);
      row.lr_pvalue = *row.lr > 0.0 ? boost::math::cdf(boost::math::complement(chi, *row.lr)) : 1.0;
    }
    out.rows.push_back(row);
  }

  auto argmin = [&](double LagRow::*field) {
    int best = 0;
    for (const auto& r : out.rows) {
      if (r.*field < out.rows[static_cast<std::size_t>(best)].*field) best = r.lag;
    }
    return best;
  };
  out.lag_fpe = argmin(&LagRow::fpe);
  out.lag_aic = argmin(&LagRow::aic);
  out.lag_hqic = argmin(&LagRow::hqic);
  out.lag_sbic = argmin(&LagRow::sbic);
  out.lag_lr = 0;
  for (const auto& r : out.rows) {
    if (r.lr_pvalue && *r.lr_pvalue < 0.05) out.lag_lr = r.lag;
  }
  return out;
}

VarFit var_fit(const MatrixXd& y, int lag) {
  check_system(y, lag, "var_fit");
  if (lag < 1) throw Error(ErrorCode::InvalidArgument, "var_fit: lag must be >= 1");
  const Eigen::Index first = lag;
  const Eigen::Index n = y.rows() - first;
  const MatrixXd X = lagged(y, first, lag);

  VarFit out;
  out.lag = lag;
  out.n_obs = static_cast<std::size_t>(n);
  double ssr = 0.0;
  double sst = 0.0;
  double dof = 0.0;
  for (Eigen::Index eq = 0; eq < y.cols(); ++eq) {
    const VectorXd target = y.col(eq).tail(n);
    OlsResult r;
    try {
      r = ols(target, X, true);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::RankDeficient) throw;
      throw Error(ErrorCode::Singular, std::string("var_fit: ") + e.what());
    }
    ssr += r.ssr;
    sst += (target.array() - target.mean()).square().sum();
    dof += static_cast<double>(r.n_obs - r.n_params);
    out.equations.push_back(std::move(r));
  }
  out.system_r2 = 1.0 - ssr / sst;
  out.system_rmse = std::sqrt(ssr / dof);
  return out;
}

}  // namespace demotrend::econ
