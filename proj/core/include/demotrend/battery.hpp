#pragma once

#include <array>
#include <span>

#include "demotrend/econometrics.hpp"

namespace demotrend::econ {

struct BatteryOptions {
  int adf_max_lag = 3;
  int dfgls_max_lag = 4;
  Trend unit_root_trend = Trend::Constant;
  int lag_select_max = 4;
  int johansen_lag = 3;
  int eg_max_lag = 3;
  double integration_level = 0.01;  // level for the I(1)/I(0) calls
  double eg_level = 0.05;
};

/// Unit-root, lag-selection, Engle-Granger and Johansen results for a
/// (measured, predicted) pair, plus goodness-of-fit of the static and VAR
/// representations.
struct BatteryReport {
  BatteryOptions options;
  std::size_t n_obs = 0;

  std::vector<UnitRootReport> adf_levels_measured;
  std::vector<UnitRootReport> adf_levels_predicted;
  std::vector<UnitRootReport> dfgls_levels_measured;
  std::vector<UnitRootReport> dfgls_levels_predicted;
  std::vector<UnitRootReport> adf_diff_measured;
  std::vector<UnitRootReport> adf_diff_predicted;
  std::vector<UnitRootReport> dfgls_diff_measured;
  std::vector<UnitRootReport> dfgls_diff_predicted;

  LagSelection lag_selection;
  EngleGrangerReport engle_granger;
  std::array<JohansenReport, 3> johansen;  // none, rconstant, constant
  VarFit var;
  OlsResult static_regression;             // measured on predicted

  // Verdicts, each taken from the report at the largest ADF lag.
  bool levels_integrated = false;      // both levels keep their unit root
  bool differences_stationary = false; // both differences reject it
  bool eg_stationary = false;          // EG residuals reject it
  int johansen_rank = 0;               // under the constant specification

  const JohansenReport& johansen_for(JohansenTrend trend) const {
    return johansen[static_cast<std::size_t>(trend)];
  }
};

BatteryReport run_battery(std::span<const double> measured, std::span<const double> predicted,
                          const BatteryOptions& options = {});

}  // namespace demotrend::econ
