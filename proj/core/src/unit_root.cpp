#include <algorithm>
#include <cmath>
#include <string>

#include "demotrend/econometrics.hpp"

namespace demotrend::econ {

std::string_view to_string(Trend trend) noexcept {
  switch (trend) {
    case Trend::None: return "none";
    case Trend::Constant: return "constant";
    case Trend::Trend: return "trend";
  }
  return "unknown";
}

Trend parse_trend(std::string_view text) {
  if (text == "none") return Trend::None;
  if (text == "constant") return Trend::Constant;
  if (text == "trend") return Trend::Trend;
  throw Error(ErrorCode::InvalidArgument,
              "unknown trend '" + std::string(text) + "' (expected none|constant|trend)");
}

std::string_view to_string(UnitRootTest test) noexcept {
  return test == UnitRootTest::Adf ? "adf" : "dfgls";
}

void classify(UnitRootReport& report) {
  report.reject_at.reset();
  if (report.statistic < report.critical.pct10) report.reject_at = 0.10;
  if (report.statistic < report.critical.pct5) report.reject_at = 0.05;
  if (report.statistic < report.critical.pct1) report.reject_at = 0.01;
}

namespace {

void check_series(std::span<const double> y, int max_lag, std::string_view op) {
  if (max_lag < 0) {
    throw Error(ErrorCode::InvalidArgument, std::string(op) + ": max_lag must be >= 0");
  }
  if (y.size() <= static_cast<std::size_t>(max_lag) + 10) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(op) + ": series of length " + std::to_string(y.size()) +
                    " too short for max_lag " + std::to_string(max_lag) +
                    " (need > max_lag + 10)");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, std::string(op) + ": non-finite value");
  }
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*hi - *lo <= 0.0) {
    throw Error(ErrorCode::Degenerate, std::string(op) + ": series is constant (zero variance)");
  }
}

struct DfRegression {
  double statistic;
  std::size_t n_obs;
};

// Dy_t on y_{t-1}, Dy_{t-1..t-lag} and deterministic terms, over t = lag+1..T-1.
DfRegression df_regression(std::span<const double> y, int lag, Trend trend) {
  const std::size_t T = y.size();
  const auto k = static_cast<std::size_t>(lag);
  const std::size_t first = k + 1;
  const std::size_t n = T - first;
  const std::size_t cols = 1 + k + (trend == Trend::Trend ? 1 : 0);

  VectorXd dy(n);
  MatrixXd X(n, cols);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t t = first + i;
    dy(i) = y[t] - y[t - 1];
    X(i, 0) = y[t - 1];
    for (std::size_t j = 1; j <= k; ++j) X(i, j) = y[t - j] - y[t - j - 1];
    if (trend == Trend::Trend) X(i, cols - 1) = static_cast<double>(t);
  }
  const double scale = dy.squaredNorm();
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::Degenerate, "unit-root regression: differences are identically zero");
  }
  const OlsResult r = ols(dy, X, trend != Trend::None);
  if (r.ssr <= 1e-24 * scale) {
    throw Error(ErrorCode::Degenerate, "unit-root regression fits exactly; t-ratio undefined");
  }
  return {r.t_stats(0), n};
}

}  // namespace

std::vector<UnitRootReport> adf(std::span<const double> series, int max_lag, Trend trend) {
  check_series(series, max_lag, "adf");
  std::vector<UnitRootReport> out;
  for (int lag = 0; lag <= max_lag; ++lag) {
    const auto reg = df_regression(series, lag, trend);
    UnitRootReport rep;
    rep.test = UnitRootTest::Adf;
    rep.lag = lag;
    rep.trend = trend;
    rep.statistic = reg.statistic;
    rep.n_obs = reg.n_obs;
    rep.critical = adf_critical(trend, reg.n_obs);
    classify(rep);
    out.push_back(std::move(rep));
  }
  return out;
}

std::vector<double> gls_detrend(std::span<const double> series, Trend trend,
                                std::optional<double> alpha) {
  std::vector<double> y(series.begin(), series.end());
  if (trend == Trend::None) return y;

  const std::size_t T = y.size();
  const double a = alpha.value_or(1.0 - (trend == Trend::Trend ? 13.5 : 7.0) / static_cast<double>(T));
  const std::size_t q = trend == Trend::Trend ? 2 : 1;

  VectorXd ya(T);
  MatrixXd za(T, q);
  auto z = [&](std::size_t t, std::size_t j) { return j == 0 ? 1.0 : static_cast<double>(t + 1); };
  ya(0) = y[0];
  for (std::size_t j = 0; j < q; ++j) za(0, j) = z(0, j);
  for (std::size_t t = 1; t < T; ++t) {
    ya(t) = y[t] - a * y[t - 1];
    for (std::size_t j = 0; j < q; ++j) za(t, j) = z(t, j) - a * z(t - 1, j);
  }
  const VectorXd beta = ols(ya, za, false).coefficients;
  for (std::size_t t = 0; t < T; ++t) {
    double fitted = 0.0;
    for (std::size_t j = 0; j < q; ++j) fitted += beta(j) * z(t, j);
    y[t] -= fitted;
  }
  return y;
}

std::vector<UnitRootReport> dfgls(std::span<const double> series, int max_lag, Trend trend,
                                  std::optional<double> alpha) {
  check_series(series, max_lag, "dfgls");
  const std::vector<double> detrended = gls_detrend(series, trend, alpha);
  std::vector<UnitRootReport> out;
  for (int lag = 0; lag <= max_lag; ++lag) {
    const auto reg = df_regression(detrended, lag, Trend::None);
    UnitRootReport rep;
    rep.test = UnitRootTest::DfGls;
    rep.lag = lag;
    rep.trend = trend;
    rep.statistic = reg.statistic;
    rep.n_obs = reg.n_obs;
    rep.critical = dfgls_critical(trend, series.size());
    classify(rep);
    out.push_back(std::move(rep));
  }
  return out;
}

EngleGrangerReport engle_granger(std::span<const double> y, std::span<const double> x,
                                 int max_lag) {
  if (y.size() != x.size()) {
    throw Error(ErrorCode::InvalidArgument, "engle_granger: series lengths differ");
  }
  if (y.size() <= 30) {
    throw Error(ErrorCode::InvalidArgument, "engle_granger: need more than 30 observations");
  }
  const auto n = static_cast<Eigen::Index>(y.size());
  const VectorXd yv = Eigen::Map<const VectorXd>(y.data(), n);
  const MatrixXd xm = Eigen::Map<const VectorXd>(x.data(), n);

  EngleGrangerReport out;
  out.first_stage = ols(yv, xm, true);
  const double sst = (yv.array() - yv.mean()).square().sum();
  if (out.first_stage.ssr <= 1e-20 * sst) {
    throw Error(ErrorCode::Degenerate,
                "engle_granger: first-stage residuals are identically zero (y is an exact "
                "linear function of x)");
  }

  const VectorXd& e = out.first_stage.residuals;
  const std::span<const double> resid(e.data(), static_cast<std::size_t>(e.size()));
  auto with_eg_critical = [](std::vector<UnitRootReport> reports) {
    for (auto& r : reports) {
      r.critical = engle_granger_critical(r.n_obs);
      classify(r);
    }
    return reports;
  };
  out.residual_tests = with_eg_critical(adf(resid, max_lag, Trend::None));
  auto gls = with_eg_critical(dfgls(resid, max_lag, Trend::None));
  out.residual_tests.insert(out.residual_tests.end(), gls.begin(), gls.end());
  return out;
}

}  // namespace demotrend::econ
