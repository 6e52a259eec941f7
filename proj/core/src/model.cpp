#include "demotrend/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace demotrend {

namespace {

constexpr std::array<Preset, 6> kPresets{{
    {"postcensal-1990s", {170.0, -0.04}, ProxySpec{9, 2, 0, 1}, "five-age postcensal N9, 1990-2000"},
    {"intercensal", {165.0, -0.055}, ProxySpec{9, 2, 0, 1}, "five-age intercensal N9, 1991-2003"},
    {"7yo-horizon", {165.0, -0.061}, ProxySpec{7, 2, 24, 1},
     "7-year-olds shifted +24 months, 1992-2003"},
    {"17yo-back", {35.0, 0.089}, ProxySpec{17, 0, -96, 4},
     "17-year-olds, 4-month window, shifted -96 months"},
    {"post-2005", {30.0, -0.1}, ProxySpec{3, 2, 72, 1}, "3-year-olds shifted +72 months, after 2005"},
    {"gdp", {10.0, -0.25}, std::nullopt, "two-quarter mean annualized real GDP growth"},
}};

// Months used for fitting: common range, clipped to `range`, minus exclusions.
struct Sample {
  std::vector<double> y;
  std::vector<double> x;
  MonthRange range;
};

Sample build_sample(const MonthlySeries& measured, const MonthlySeries& rate,
                    const std::optional<MonthRange>& range,
                    const std::vector<MonthRange>& exclusions) {
  auto [m, r] = align(measured, rate);
  MonthKey from = m.start();
  MonthKey to = m.last();
  if (range) {
    from = std::max(from, range->from);
    to = std::min(to, range->to);
  }
  if (to < from) {
    throw Error(ErrorCode::OutOfRange, "fit range does not intersect the data");
  }
  Sample s{{}, {}, {from, to}};
  for (MonthKey k = from; k <= to; k = k.next()) {
    const bool excluded = std::any_of(exclusions.begin(), exclusions.end(),
                                      [&](const MonthRange& e) { return e.contains(k); });
    if (excluded) continue;
    s.y.push_back(m.at(k));
    s.x.push_back(r.at(k));
  }
  if (s.y.size() < kMinFitMonths) {
    throw Error(ErrorCode::InvalidArgument,
                "fit needs at least " + std::to_string(kMinFitMonths) +
                    " overlapping months, got " + std::to_string(s.y.size()));
  }
  return s;
}

struct ResidualStats {
  double rms;
  double mean;
};

ResidualStats residual_stats(const Sample& s, double a, double b) {
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const double e = s.y[i] - (a * s.x[i] + b);
    sum += e;
    sum_sq += e * e;
  }
  const double n = static_cast<double>(s.y.size());
  return {std::sqrt(sum_sq / n), sum / n};
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

std::span<const Preset> presets() { return kPresets; }

const Preset& find_preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : kPresets) known += (known.empty() ? "" : ", ") + std::string(p.name);
  throw Error(ErrorCode::InvalidArgument,
              "unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

std::string_view to_string(FitMethod method) noexcept {
  return method == FitMethod::Ols ? "ols" : "grid";
}

FitMethod parse_fit_method(std::string_view text) {
  if (text == "ols") return FitMethod::Ols;
  if (text == "grid") return FitMethod::Grid;
  throw Error(ErrorCode::InvalidArgument, "unknown fit method '" + std::string(text) + "'");
}

GridLattice GridLattice::uniform(double a_min, double a_max, double a_step, double b_min,
                                 double b_max, double b_step) {
  if (!(a_step > 0.0) || !(b_step > 0.0) || a_max < a_min || b_max < b_min) {
    throw Error(ErrorCode::InvalidArgument, "grid lattice needs positive steps and min <= max");
  }
  auto axis = [](double lo, double hi, double step) {
    std::vector<double> v;
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) v.push_back(lo + static_cast<double>(i) * step);
    return v;
  };
  return {axis(a_min, a_max, a_step), axis(b_min, b_max, b_step)};
}

MonthlySeries predict(const MonthlySeries& rate, double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidArgument, "predict: coefficients must be finite");
  }
  std::vector<double> out(rate.size());
  for (std::size_t i = 0; i < rate.size(); ++i) out[i] = a * rate[i] + b;
  return MonthlySeries(rate.start(), std::move(out), Unit::Return);
}

MonthlySeries measured_returns(const MonthlySeries& prices) {
  return cumulative_return_12m(monthly_return(prices));
}

ModelFit fit(const MonthlySeries& measured, const MonthlySeries& rate, const FitOptions& options) {
  const Sample s = build_sample(measured, rate, options.range, options.exclusions);
  ModelFit result;
  result.fit_range = s.range;
  result.n_obs = s.y.size();
  result.predictor = options.predictor;
  result.method = options.method;

  if (options.method == FitMethod::Ols) {
    const double mx = mean_of(s.x);
    const double my = mean_of(s.y);
    double sxx = 0.0;
    double sxy = 0.0;
    double sx2 = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      sxx += (s.x[i] - mx) * (s.x[i] - mx);
      sxy += (s.x[i] - mx) * (s.y[i] - my);
      sx2 += s.x[i] * s.x[i];
    }
    // Relative test: a constant predictor leaves only rounding noise in sxx.
    if (!(sxx > 1e-20 * sx2) || sxx <= 1e-300) {
      throw Error(ErrorCode::Degenerate, "fit: predictor has zero variance over the fit range");
    }
    result.a = sxy / sxx;
    result.b = my - result.a * mx;
  } else {
    if (options.grid.a_values.empty() || options.grid.b_values.empty()) {
      throw Error(ErrorCode::InvalidArgument, "grid fit needs a non-empty lattice");
    }
    auto as = options.grid.a_values;
    auto bs = options.grid.b_values;
    std::sort(as.begin(), as.end());
    std::sort(bs.begin(), bs.end());
    double best = std::numeric_limits<double>::infinity();
    for (double a : as) {
      for (double b : bs) {
        const double rms = residual_stats(s, a, b).rms;
        if (rms < best) {
          best = rms;
          result.a = a;
          result.b = b;
        }
      }
    }
  }
  const auto stats = residual_stats(s, result.a, result.b);
  result.rms = stats.rms;
  result.mean_resid = stats.mean;
  return result;
}

ModelFit evaluate(const MonthlySeries& measured, const MonthlySeries& rate, Coefficients c,
                  const FitOptions& options) {
  const Sample s = build_sample(measured, rate, options.range, options.exclusions);
  ModelFit result;
  result.a = c.a;
  result.b = c.b;
  result.fit_range = s.range;
  result.n_obs = s.y.size();
  result.predictor = options.predictor;
  result.method = options.method;
  result.fixed = true;
  const auto stats = residual_stats(s, c.a, c.b);
  result.rms = stats.rms;
  result.mean_resid = stats.mean;
  return result;
}

MonthlySeries residuals(const MonthlySeries& measured, const MonthlySeries& predicted) {
  auto [m, p] = align(measured, predicted);
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] - p[i];
  return MonthlySeries(m.start(), std::move(out), Unit::Return);
}

MonthlySeries gdp_predict(const QuarterlySeries& gdp_growth, double a, double b) {
  if (gdp_growth.unit() != QuarterlyUnit::GrowthRate) {
    throw Error(ErrorCode::InvalidArgument, "gdp_predict: expects annualized growth rates");
  }
  if (gdp_growth.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "gdp_predict: need at least 2 quarters");
  }
  std::vector<double> quarterly;
  for (std::size_t j = 2; j <= gdp_growth.size(); ++j) {
    const double g = 0.5 * (gdp_growth[j - 1] + gdp_growth[j - 2]);
    quarterly.push_back(a * g + b);
  }
  QuarterlySeries stepped(gdp_growth.start().plus(2), std::move(quarterly),
                          QuarterlyUnit::GrowthRate);
  return quarterly_to_monthly(stepped, BridgeMethod::Step, Unit::Return);
}

BacktestReport backtest(const AgePyramid& pyramid, const MonthlySeries& prices,
                        const ProxySpec& spec, const MonthRange& fit_range,
                        const MonthRange& eval_range, const BacktestOptions& options) {
  BacktestReport report;
  report.overlapping = fit_range.overlaps(eval_range);
  if (report.overlapping && !options.allow_overlap) {
    throw Error(ErrorCode::InvalidArgument,
                "backtest: fit range " + fit_range.from.to_string() + ".." +
                    fit_range.to.to_string() + " overlaps eval range " +
                    eval_range.from.to_string() + ".." + eval_range.to.to_string() +
                    " (pass allow_overlap to accept)");
  }
  const MonthlySeries measured = measured_returns(prices);
  const MonthlySeries rate = n9_change_rate(pyramid, spec);

  FitOptions fo;
  fo.method = options.method;
  fo.grid = options.grid;
  fo.range = fit_range;
  fo.exclusions = options.exclusions;
  fo.predictor = spec;
  report.fit = options.fixed ? evaluate(measured, rate, *options.fixed, fo) : fit(measured, rate, fo);

  auto [m, r] = align(measured, rate);
  const MonthKey from = std::max(m.start(), eval_range.from);
  const MonthKey to = std::min(m.last(), eval_range.to);
  if (to < from) {
    throw Error(ErrorCode::OutOfRange, "backtest: eval range does not intersect the data");
  }
  report.eval_range = {from, to};
  std::vector<double> errors;
  std::vector<double> measured_eval;
  for (MonthKey k = from; k <= to; k = k.next()) {
    const bool excluded = std::any_of(options.exclusions.begin(), options.exclusions.end(),
                                      [&](const MonthRange& e) { return e.contains(k); });
    if (excluded) continue;
    const double y = m.at(k);
    errors.push_back(y - (report.fit.a * r.at(k) + report.fit.b));
    measured_eval.push_back(y);
  }
  if (errors.empty()) {
    throw Error(ErrorCode::OutOfRange, "backtest: no evaluation months after exclusions");
  }
  report.n_eval = errors.size();
  double ss = 0.0;
  for (double e : errors) ss += e * e;
  report.eval_rms = std::sqrt(ss / static_cast<double>(errors.size()));
  report.eval_mean = mean_of(errors);
  report.eval_std = sample_std(errors);
  report.baseline_std = sample_std(measured_eval);
  return report;
}

MonthlySeries cumulate(const MonthlySeries& returns) {
  if (returns.unit() != Unit::Return) {
    throw Error(ErrorCode::InvalidArgument, "cumulate: expects dimensionless returns");
  }
  std::vector<double> out(returns.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < returns.size(); ++i) {
    sum += returns[i];
    out[i] = sum;
  }
  return MonthlySeries(returns.start(), std::move(out), Unit::Return);
}

}  // namespace demotrend
