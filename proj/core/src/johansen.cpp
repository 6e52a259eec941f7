#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "demotrend/econometrics.hpp"

namespace demotrend::econ {

std::string_view to_string(JohansenTrend trend) noexcept {
  switch (trend) {
    case JohansenTrend::None: return "none";
    case JohansenTrend::RConstant: return "rconstant";
    case JohansenTrend::Constant: return "constant";
  }
  return "unknown";
}

JohansenTrend parse_johansen_trend(std::string_view text) {
  if (text == "none") return JohansenTrend::None;
  if (text == "rconstant") return JohansenTrend::RConstant;
  if (text == "constant") return JohansenTrend::Constant;
  throw Error(ErrorCode::InvalidArgument,
              "unknown johansen trend '" + std::string(text) + "' (expected none|rconstant|constant)");
}

namespace {

// Residuals of each column of `z` after projecting on `on`; `z` unchanged if `on` is empty.
MatrixXd partial_out(const MatrixXd& z, const MatrixXd& on) {
  if (on.cols() == 0) return z;
  Eigen::ColPivHouseholderQR<MatrixXd> qr(on);
  qr.setThreshold(1e-11);
  if (qr.rank() < on.cols()) {
    throw Error(ErrorCode::Singular, "johansen: short-run regressors are collinear");
  }
  return z - on * qr.solve(z);
}

}  // namespace

JohansenReport johansen(const MatrixXd& y, int lag, JohansenTrend trend) {
  const Eigen::Index K = y.cols();
  if (lag < 1) throw Error(ErrorCode::InvalidArgument, "johansen: lag must be >= 1");
  if (K < 1 || K > 5) {
    throw Error(ErrorCode::InvalidArgument, "johansen: system must have 1..5 variables");
  }
  if (y.rows() <= 10 * lag) {
    throw Error(ErrorCode::InvalidArgument, "johansen: " + std::to_string(y.rows()) +
                                                " observations too few for lag " +
                                                std::to_string(lag) + " (need > 10 * lag)");
  }
  if (!y.allFinite()) throw Error(ErrorCode::InvalidArgument, "johansen: non-finite data");

  // Rows t = lag..T-1 (0-based); the VECM carries lag - 1 lagged differences.
  const Eigen::Index first = lag;
  const Eigen::Index n = y.rows() - first;
  const Eigen::Index n_diff = K * (lag - 1);
  const Eigen::Index z1_cols = K + (trend == JohansenTrend::RConstant ? 1 : 0);
  const Eigen::Index z2_cols = n_diff + (trend == JohansenTrend::Constant ? 1 : 0);

  MatrixXd z0(n, K);
  MatrixXd z1(n, z1_cols);
  MatrixXd z2(n, z2_cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index t = first + i;
    z0.row(i) = y.row(t) - y.row(t - 1);
    z1.row(i).head(K) = y.row(t - 1);
    if (trend == JohansenTrend::RConstant) z1(i, K) = 1.0;
    for (int j = 1; j < lag; ++j) {
      z2.block(i, K * (j - 1), 1, K) = y.row(t - j) - y.row(t - j - 1);
    }
    if (trend == JohansenTrend::Constant) z2(i, z2_cols - 1) = 1.0;
  }

  const MatrixXd r0 = partial_out(z0, z2);
  const MatrixXd r1 = partial_out(z1, z2);
  const double T = static_cast<double>(n);
  const MatrixXd s00 = r0.transpose() * r0 / T;
  const MatrixXd s11 = r1.transpose() * r1 / T;
  const MatrixXd s01 = r0.transpose() * r1 / T;

  Eigen::LLT<MatrixXd> llt00(s00);
  Eigen::LLT<MatrixXd> llt11(s11);
  if (llt00.info() != Eigen::Success || llt11.info() != Eigen::Success) {
    throw Error(ErrorCode::Singular, "johansen: moment matrix S00 or S11 is singular");
  }
  // Symmetrize S11^-1/2' S10 S00^-1 S01 S11^-1/2 through the Cholesky factor.
  const MatrixXd L = llt11.matrixL();
  const MatrixXd middle = s01.transpose() * llt00.solve(s01);
  const MatrixXd left = L.triangularView<Eigen::Lower>().solve(middle);
  const MatrixXd sym = L.triangularView<Eigen::Lower>().solve(left.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (sym + sym.transpose()),
                                              Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::Singular, "johansen: eigenvalue decomposition failed");
  }

  std::vector<double> lambdas(eig.eigenvalues().data(),
                              eig.eigenvalues().data() + eig.eigenvalues().size());
  std::sort(lambdas.begin(), lambdas.end(), std::greater<>());
  lambdas.resize(static_cast<std::size_t>(K));
  for (double& l : lambdas) {
    if (l < 0.0) l = 0.0;  // rounding only: the exact values are >= 0
    if (l >= 1.0 - 1e-12) {
      throw Error(ErrorCode::Singular, "johansen: eigenvalue at 1 (perfectly predictable differences)");
    }
  }

  JohansenReport rep;
  rep.trend = trend;
  rep.lag = lag;
  rep.n_obs = static_cast<std::size_t>(n);
  rep.eigenvalues = lambdas;
  rep.rank = static_cast<int>(K);
  bool decided = false;
  for (Eigen::Index r = 0; r < K; ++r) {
    double stat = 0.0;
    for (Eigen::Index i = r; i < K; ++i) stat -= T * std::log1p(-lambdas[static_cast<std::size_t>(i)]);
    rep.trace.push_back(stat);
    rep.critical_5pct.push_back(johansen_trace_critical(trend, static_cast<int>(K - r)));
    if (!decided && stat < rep.critical_5pct.back().value) {
      rep.rank = static_cast<int>(r);
      decided = true;
    }
  }
  return rep;
}

}  // namespace demotrend::econ
