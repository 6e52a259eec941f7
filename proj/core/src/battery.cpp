#include "demotrend/battery.hpp"

#include <algorithm>
#include <string>

namespace demotrend::econ {

namespace {

std::vector<double> diff(std::span<const double> x) {
  std::vector<double> d;
  d.reserve(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) d.push_back(x[i] - x[i - 1]);
  return d;
}

}  // namespace

BatteryReport run_battery(std::span<const double> measured, std::span<const double> predicted,
                          const BatteryOptions& options) {
  if (measured.size() != predicted.size()) {
    throw Error(ErrorCode::InvalidArgument, "battery: series must be aligned (equal length)");
  }
  if (measured.size() < 100) {
    throw Error(ErrorCode::InvalidArgument, "battery: need at least 100 aligned months, got " +
                                                std::to_string(measured.size()));
  }
  BatteryReport rep;
  rep.options = options;
  rep.n_obs = measured.size();

  const Trend trend = options.unit_root_trend;
  rep.adf_levels_measured = adf(measured, options.adf_max_lag, trend);
  rep.adf_levels_predicted = adf(predicted, options.adf_max_lag, trend);
  rep.dfgls_levels_measured = dfgls(measured, options.dfgls_max_lag, trend);
  rep.dfgls_levels_predicted = dfgls(predicted, options.dfgls_max_lag, trend);

  const auto dm = diff(measured);
  const auto dp = diff(predicted);
  rep.adf_diff_measured = adf(dm, options.adf_max_lag, trend);
  rep.adf_diff_predicted = adf(dp, options.adf_max_lag, trend);
  rep.dfgls_diff_measured = dfgls(dm, options.dfgls_max_lag, trend);
  rep.dfgls_diff_predicted = dfgls(dp, options.dfgls_max_lag, trend);

  const auto n = static_cast<Eigen::Index>(measured.size());
  MatrixXd system(n, 2);
  system.col(0) = Eigen::Map<const VectorXd>(measured.data(), n);
  system.col(1) = Eigen::Map<const VectorXd>(predicted.data(), n);

  rep.lag_selection = lag_select(system, options.lag_select_max);
  rep.engle_granger = engle_granger(measured, predicted, options.eg_max_lag);
  rep.johansen = {johansen(system, options.johansen_lag, JohansenTrend::None),
                  johansen(system, options.johansen_lag, JohansenTrend::RConstant),
                  johansen(system, options.johansen_lag, JohansenTrend::Constant)};
  rep.var = var_fit(system, std::max(1, options.johansen_lag));
  rep.static_regression = ols(system.col(0), system.col(1), true);

  const double lvl = options.integration_level;
  rep.levels_integrated = !rep.adf_levels_measured.back().rejects(lvl) &&
                          !rep.adf_levels_predicted.back().rejects(lvl);
  rep.differences_stationary =
      rep.adf_diff_measured.back().rejects(lvl) && rep.adf_diff_predicted.back().rejects(lvl);
  // residual_tests holds ADF lags 0..eg_max_lag first.
  rep.eg_stationary =
      rep.engle_granger.residual_tests[static_cast<std::size_t>(options.eg_max_lag)].rejects(
          options.eg_level);
  rep.johansen_rank = rep.johansen_for(JohansenTrend::Constant).rank;
  return rep;
}

}  // namespace demotrend::econ
