#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "demotrend/error.hpp"

namespace demotrend::econ {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct OlsResult {
  VectorXd coefficients;  // regressors in column order, then the intercept if any
  VectorXd std_errors;    // classical, sigma^2 (X'X)^-1
  VectorXd t_stats;
  VectorXd residuals;
  double r_squared = 0.0;  // centered with an intercept, uncentered without
  double rmse = 0.0;       // sqrt(SSR / (n - k))
  double ssr = 0.0;
  std::size_t n_obs = 0;
  std::size_t n_params = 0;
  bool intercept = false;
};

/// Least squares of y on the columns of X (plus a trailing constant when
/// `intercept`). Rank-deficient designs are rejected with the offending column.
OlsResult ols(const VectorXd& y, const MatrixXd& X, bool intercept);

// ---------------------------------------------------------------------------
// Unit-root tests

enum class Trend { None, Constant, Trend };

std::string_view to_string(Trend trend) noexcept;
Trend parse_trend(std::string_view text);

enum class UnitRootTest { Adf, DfGls };

std::string_view to_string(UnitRootTest test) noexcept;

struct CriticalValues {
  double pct1 = 0.0;
  double pct5 = 0.0;
  double pct10 = 0.0;
  std::string source;
};

/// Dickey-Fuller t critical values from Fuller's table, interpolated
/// linearly in the number of regression observations.
CriticalValues adf_critical(Trend trend, std::size_t n_obs);

/// DF-GLS: the no-constant DF distribution for None/Constant, the
/// Elliott-Rothenberg-Stock table for Trend.
CriticalValues dfgls_critical(Trend trend, std::size_t n_obs);

/// Residual-based cointegration test, two variables with a constant in the
/// first stage (MacKinnon 2010 response surface).
CriticalValues engle_granger_critical(std::size_t n_obs);

struct UnitRootReport {
  UnitRootTest test = UnitRootTest::Adf;
  int lag = 0;  // number of lagged differences; lag 0 is the plain DF regression
  Trend trend = Trend::Constant;
  double statistic = 0.0;
  CriticalValues critical;
  std::optional<double> reject_at;  // strictest of 0.01/0.05/0.10 rejected
  std::size_t n_obs = 0;

  bool rejects(double level) const { return reject_at && *reject_at <= level; }
};

/// Fill `reject_at` from the statistic and critical values (left-tailed).
void classify(UnitRootReport& report);

/// One report per lag 0..max_lag. Each lag uses its largest available sample.
std::vector<UnitRootReport> adf(std::span<const double> series, int max_lag, Trend trend);

/// GLS local-to-unity detrending: alpha = 1 - 7/T (Constant) or 1 - 13.5/T
/// (Trend) unless overridden. Trend::None leaves the series untouched.
std::vector<double> gls_detrend(std::span<const double> series, Trend trend,
                                std::optional<double> alpha = std::nullopt);

/// ADF regression without deterministic terms on the GLS-detrended series,
/// one report per lag 0..max_lag.
std::vector<UnitRootReport> dfgls(std::span<const double> series, int max_lag, Trend trend,
                                  std::optional<double> alpha = std::nullopt);

// ---------------------------------------------------------------------------
// VAR systems. Data are T x K with one column per variable.

struct LagRow {
  int lag = 0;
  double log_likelihood = 0.0;
  std::optional<double> lr;         // absent at lag 0
  std::optional<double> lr_pvalue;
  int lr_df = 0;
  double fpe = 0.0;
  double aic = 0.0;
  double hqic = 0.0;
  double sbic = 0.0;
};

struct LagSelection {
  std::vector<LagRow> rows;
  int lag_lr = 0;
  int lag_fpe = 0;
  int lag_aic = 0;
  int lag_hqic = 0;
  int lag_sbic = 0;
  std::size_t n_obs = 0;  // common sample
};

/// VAR(0..max_lag) with constants on a common sample. Criteria follow the
/// likelihood form: IC = -2 LL / T + penalty * K (K p + 1) / T; smaller is
/// better. LR picks the largest lag significant at 5% (df = K^2).
LagSelection lag_select(const MatrixXd& y, int max_lag);

struct VarFit {
  int lag = 0;
  std::vector<OlsResult> equations;
  double system_r2 = 0.0;    // 1 - sum SSR / sum SST
  double system_rmse = 0.0;  // sqrt(sum SSR / sum dof)
  std::size_t n_obs = 0;
};

VarFit var_fit(const MatrixXd& y, int lag);

struct EngleGrangerReport {
  OlsResult first_stage;
  std::vector<UnitRootReport> residual_tests;  // ADF then DF-GLS, trend none
};

/// Regress y on x with an intercept, then test the residuals for a unit
/// root against residual-based (Engle-Granger) critical values.
EngleGrangerReport engle_granger(std::span<const double> y, std::span<const double> x,
                                 int max_lag);

// ---------------------------------------------------------------------------
// Johansen

enum class JohansenTrend { None, RConstant, Constant };

std::string_view to_string(JohansenTrend trend) noexcept;
JohansenTrend parse_johansen_trend(std::string_view text);

struct TraceCritical {
  double value = 0.0;
  std::string source;
};

/// 5% trace critical value for `n_minus_r` common trends (1..5).
TraceCritical johansen_trace_critical(JohansenTrend trend, int n_minus_r);

struct JohansenReport {
  JohansenTrend trend = JohansenTrend::Constant;
  int lag = 0;                       // VAR order; the VECM has lag - 1 differences
  std::vector<double> eigenvalues;   // descending, each in [0, 1)
  std::vector<double> trace;         // trace[r] tests rank <= r
  std::vector<TraceCritical> critical_5pct;
  int rank = 0;                      // first r whose trace stat < critical value
  std::size_t n_obs = 0;
};

JohansenReport johansen(const MatrixXd& y, int lag, JohansenTrend trend);

}  // namespace demotrend::econ
