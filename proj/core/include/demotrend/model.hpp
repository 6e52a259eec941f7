#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "demotrend/population.hpp"
#include "demotrend/series.hpp"

namespace demotrend {

/// R_p(t) = a * rate(t) + b.
struct Coefficients {
  double a = 0.0;
  double b = 0.0;
};

struct Preset {
  std::string_view name;
  Coefficients coefficients;
  std::optional<ProxySpec> proxy;  // the proxy the coefficients were fitted with
  std::string_view description;
};

/// Published coefficient sets, replayable without a fitting step.
std::span<const Preset> presets();
const Preset& find_preset(std::string_view name);

enum class FitMethod { Ols, Grid };

std::string_view to_string(FitMethod method) noexcept;
FitMethod parse_fit_method(std::string_view text);

/// Candidate (a, b) values for grid fitting.
struct GridLattice {
  std::vector<double> a_values;
  std::vector<double> b_values;

  /// Inclusive lattice; values are min + i * step so integers stay exact.
  static GridLattice uniform(double a_min, double a_max, double a_step, double b_min,
                             double b_max, double b_step);
};

/// The predictor fed to the model. Monostate means unspecified.
struct GdpPredictor {
  friend bool operator==(const GdpPredictor&, const GdpPredictor&) = default;
};
using Predictor = std::variant<std::monostate, ProxySpec, GdpPredictor>;

struct ModelFit {
  double a = 0.0;
  double b = 0.0;
  double rms = 0.0;
  double mean_resid = 0.0;
  MonthRange fit_range;
  std::size_t n_obs = 0;
  Predictor predictor;
  FitMethod method = FitMethod::Ols;
  bool fixed = false;  // coefficients supplied (preset), not estimated

  Coefficients coefficients() const { return {a, b}; }
};

struct FitOptions {
  FitMethod method = FitMethod::Ols;
  GridLattice grid;
  std::optional<MonthRange> range;
  std::vector<MonthRange> exclusions;
  Predictor predictor;
};

inline constexpr std::size_t kMinFitMonths = 24;

MonthlySeries predict(const MonthlySeries& rate, double a, double b);
inline MonthlySeries predict(const MonthlySeries& rate, Coefficients c) {
  return predict(rate, c.a, c.b);
}

/// Measured 12-month cumulative returns from index levels.
MonthlySeries measured_returns(const MonthlySeries& prices);

/// Estimate (a, b) of measured = a * rate + b over the usable overlap.
///
/// Ols is closed-form least squares. Grid scans the lattice for minimum
/// RMS; ties go to the smallest a, then the smallest b.
ModelFit fit(const MonthlySeries& measured, const MonthlySeries& rate, const FitOptions& options);

/// RMS and mean residual of fixed coefficients over the same sample fit() would use.
ModelFit evaluate(const MonthlySeries& measured, const MonthlySeries& rate, Coefficients c,
                  const FitOptions& options);

/// measured - predicted over the common range.
MonthlySeries residuals(const MonthlySeries& measured, const MonthlySeries& predicted);

struct Prediction {
  MonthlySeries series;
  long horizon_months = 0;
  ModelFit model;
};

/// a * (mean annualized growth of the two most recent completed quarters) + b,
/// stepped onto months. The first emitted quarter is the third of the input;
/// the last is the quarter after the input ends.
MonthlySeries gdp_predict(const QuarterlySeries& gdp_growth, double a = 10.0, double b = -0.25);

struct BacktestOptions {
  FitMethod method = FitMethod::Ols;
  GridLattice grid;
  std::vector<MonthRange> exclusions;
  bool allow_overlap = false;
  std::optional<Coefficients> fixed;
};

struct BacktestReport {
  ModelFit fit;
  MonthRange eval_range;
  std::size_t n_eval = 0;
  double eval_rms = 0.0;
  double eval_mean = 0.0;
  double eval_std = 0.0;
  double baseline_std = 0.0;  // std of measured returns: the no-model benchmark
  bool overlapping = false;
};

BacktestReport backtest(const AgePyramid& pyramid, const MonthlySeries& prices,
                        const ProxySpec& spec, const MonthRange& fit_range,
                        const MonthRange& eval_range, const BacktestOptions& options = {});

/// Running sum from the series start.
MonthlySeries cumulate(const MonthlySeries& returns);

}  // namespace demotrend
