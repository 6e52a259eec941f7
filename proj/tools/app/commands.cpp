#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "app/app.hpp"

namespace demotrend::app {

namespace fs = std::filesystem;
using io::format_report;

std::optional<MonthRange> RunConfig::fit_range() const {
  if (!fit_from && !fit_to) return std::nullopt;
  if (!fit_from || !fit_to) {
    throw Error(ErrorCode::InvalidArgument, "--fit-from and --fit-to must be given together");
  }
  if (*fit_to < *fit_from) throw Error(ErrorCode::InvalidArgument, "--fit-to precedes --fit-from");
  return MonthRange{*fit_from, *fit_to};
}

std::optional<MonthRange> RunConfig::eval_range() const {
  if (!eval_from && !eval_to) return std::nullopt;
  if (!eval_from || !eval_to) {
    throw Error(ErrorCode::InvalidArgument, "--eval-from and --eval-to must be given together");
  }
  if (*eval_to < *eval_from) {
    throw Error(ErrorCode::InvalidArgument, "--eval-to precedes --eval-from");
  }
  return MonthRange{*eval_from, *eval_to};
}

std::vector<MonthRange> RunConfig::exclusions() const {
  if (!exclude_from && !exclude_to) return {};
  if (!exclude_from || !exclude_to) {
    throw Error(ErrorCode::InvalidArgument,
                "--exclude-from and --exclude-to must be given together");
  }
  if (*exclude_to < *exclude_from) {
    throw Error(ErrorCode::InvalidArgument, "--exclude-to precedes --exclude-from");
  }
  return {MonthRange{*exclude_from, *exclude_to}};
}

namespace {

void require(const fs::path& p, std::string_view flag, std::string_view cmd) {
  if (p.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(cmd) + " requires " + std::string(flag));
  }
}

void require_out(const RunConfig& c) {
  if (c.out.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                c.subcommand + " requires --out (or DEMOTREND_OUT)");
  }
}

std::string spec_string(const ProxySpec& s) {
  return "center_age=" + std::to_string(s.center_age) + " half_width=" +
         std::to_string(s.half_width) + " month_window=" + std::to_string(s.month_window) +
         " time_shift=" + std::to_string(s.time_shift);
}

GridLattice effective_grid(const RunConfig& c) {
  if (!c.grid.a_values.empty() && !c.grid.b_values.empty()) return c.grid;
  return GridLattice::uniform(0.0, 300.0, 1.0, -0.3, 0.3, 0.001);
}

const Preset* preset_of(const RunConfig& c) {
  return c.preset ? &find_preset(*c.preset) : nullptr;
}

// Population + index inputs with their manifest entries.
struct Inputs {
  AgePyramid pyramid;
  io::IndexData index;
  io::DatasetManifest manifest;
  MonthlySeries measured;
  MonthlySeries rate;
};

Inputs load_inputs(const RunConfig& c) {
  require(c.population, "--population", c.subcommand);
  require(c.index, "--index", c.subcommand);
  AgePyramid pyramid = io::load_population(c.population);
  io::IndexData index = io::load_index(c.index);
  io::DatasetManifest manifest;
  manifest.add_population(c.population, pyramid);
  manifest.add_index(c.index, index);
  MonthlySeries measured = measured_returns(index.levels);
  MonthlySeries rate = n9_change_rate(pyramid, c.spec);
  return Inputs{std::move(pyramid), std::move(index), std::move(manifest), std::move(measured),
                std::move(rate)};
}

FitOutcome fit_model(const RunConfig& c, const Inputs& in) {
  FitOptions fo;
  fo.method = c.method;
  if (c.method == FitMethod::Grid) fo.grid = effective_grid(c);
  fo.range = c.fit_range();
  fo.exclusions = c.exclusions();
  fo.predictor = c.spec;
  if (const Preset* p = preset_of(c)) {
    if (!p->proxy) {
      throw Error(ErrorCode::InvalidArgument,
                  "preset " + std::string(p->name) + " uses the gdp predictor; use report --gdp");
    }
    return {evaluate(in.measured, in.rate, p->coefficients, fo), "preset:" + std::string(p->name)};
  }
  return {fit(in.measured, in.rate, fo), std::string(to_string(c.method))};
}

std::vector<std::string> base_notes(const RunConfig& c, const io::DatasetManifest& m) {
  std::vector<std::string> notes{"subcommand " + c.subcommand,
                                 "proxy " + spec_string(c.spec)};
  if (c.preset) notes.push_back("preset " + *c.preset);
  std::istringstream lines(m.render());
  for (std::string line; std::getline(lines, line);) notes.push_back(line);
  return notes;
}

io::Table fit_table(const FitOutcome& f) {
  io::Table t{"fit", {"key", "value"}, {}};
  t.rows = {{"a", format_report(f.fit.a)},
            {"b", format_report(f.fit.b)},
            {"rms", format_report(f.fit.rms)},
            {"mean_resid", format_report(f.fit.mean_resid)},
            {"n_obs", std::to_string(f.fit.n_obs)},
            {"fit_from", f.fit.fit_range.from.to_string()},
            {"fit_to", f.fit.fit_range.to.to_string()},
            {"method", f.label}};
  return t;
}

void print_fit(const FitOutcome& f, std::ostream& out) {
  out << "A = " << format_report(f.fit.a) << "\n"
      << "B = " << format_report(f.fit.b) << "\n"
      << "rms = " << format_report(f.fit.rms) << "\n"
      << "mean_resid = " << format_report(f.fit.mean_resid) << "\n"
      << "n_obs = " << f.fit.n_obs << "\n"
      << "fit_range = " << f.fit.fit_range.from.to_string() << ".."
      << f.fit.fit_range.to.to_string() << "\n"
      << "method = " << f.label << "\n";
}

// Model series shared by fit and report.
void add_fit_series(io::ReportBundle& b, const Inputs& in, const FitOutcome& f) {
  const MonthlySeries predicted = predict(in.rate, f.fit.coefficients());
  auto [m, p] = align(in.measured, predicted);
  b.series.push_back({"returns", {{"measured", m}, {"predicted", p}}, true});
  b.series.push_back({"residual", {{"residual", residuals(m, p)}}, true});
  const MonthRange r = f.fit.fit_range;
  b.series.push_back({"cumulative",
                      {{"measured", cumulate(m.slice(r.from, r.to))},
                       {"predicted", cumulate(p.slice(r.from, r.to))}},
                      true});
}

std::vector<fs::path> finish(const RunConfig& c, io::ReportBundle& b) {
  b.plots = c.plots;
  return io::emit_report(b, c.out);
}

std::string rej(const econ::UnitRootReport& r) {
  return r.reject_at ? format_report(*r.reject_at) : "";
}

void add_unit_root_rows(io::Table& t, const std::string& series,
                        const std::vector<econ::UnitRootReport>& reps) {
  for (const auto& r : reps) {
    t.rows.push_back({series, std::string(to_string(r.test)), std::to_string(r.lag),
                      std::string(to_string(r.trend)), format_report(r.statistic),
                      format_report(r.critical.pct1), format_report(r.critical.pct5),
                      format_report(r.critical.pct10), rej(r), std::to_string(r.n_obs)});
  }
}

io::Table unit_root_table(std::string name) {
  return {std::move(name),
          {"series", "test", "lag", "trend", "statistic", "cv_1pct", "cv_5pct", "cv_10pct",
           "reject_at", "n_obs"},
          {}};
}

std::string opt_str(const std::optional<double>& v) { return v ? format_report(*v) : ""; }

}  // namespace

FitOutcome cmd_fit(const RunConfig& c, std::ostream& out) {
  require_out(c);
  const Inputs in = load_inputs(c);
  FitOutcome f = fit_model(c, in);
  print_fit(f, out);

  io::ReportBundle b;
  b.tables.push_back(fit_table(f));
  add_fit_series(b, in, f);
  b.notes = base_notes(c, in.manifest);
  finish(c, b);
  return f;
}

Prediction cmd_forecast(const RunConfig& c, std::ostream& out) {
  require_out(c);
  if (c.spec.time_shift <= 0) {
    throw Error(ErrorCode::InvalidArgument,
                "forecast needs a positive --shift-months; with shift 0 the proxy has no lead");
  }
  require(c.population, "--population", c.subcommand);
  const AgePyramid pyramid = io::load_population(c.population);
  io::DatasetManifest manifest;
  manifest.add_population(c.population, pyramid);
  const MonthlySeries rate = n9_change_rate(pyramid, c.spec);

  ModelFit model;
  MonthKey anchor;  // last month with a measured return (or with population data)
  std::string label;
  if (!c.index.empty()) {
    const Inputs in = load_inputs(c);
    manifest = in.manifest;
    FitOutcome f = fit_model(c, in);
    model = f.fit;
    label = f.label;
    anchor = in.measured.last();
  } else {
    const Preset* p = preset_of(c);
    if (!p || !p->proxy) {
      throw Error(ErrorCode::InvalidArgument,
                  "forecast without --index needs a proxy --preset for the coefficients");
    }
    model.a = p->coefficients.a;
    model.b = p->coefficients.b;
    model.fixed = true;
    model.predictor = c.spec;
    label = "preset:" + std::string(p->name);
    anchor = pyramid.last_month();
  }

  const long available = rate.last().months_since(anchor);
  const long horizon = c.horizon_months.value_or(c.spec.time_shift);
  if (horizon <= 0) throw Error(ErrorCode::InvalidArgument, "--horizon-months must be positive");
  if (available < horizon) {
    throw Error(ErrorCode::OutOfRange,
                "requested horizon of " + std::to_string(horizon) + " months exceeds the " +
                    std::to_string(std::max(0L, available)) +
                    " months the proxy covers beyond " + anchor.to_string() + " (short by " +
                    std::to_string(horizon - std::max(0L, available)) + ")");
  }
  const MonthlySeries full = predict(rate, model.a, model.b);
  Prediction pred{full.slice(anchor.next(), anchor.plus(horizon)), horizon, model};

  out << "model = " << label << " (A = " << format_report(model.a)
      << ", B = " << format_report(model.b) << ")\n"
      << "horizon_months = " << horizon << "\n";
  for (std::size_t i = 0; i < pred.series.size(); ++i) {
    out << pred.series.month_at(i).to_string() << " " << format_report(pred.series[i]) << "\n";
  }

  io::ReportBundle b;
  io::Table t{"forecast", {"key", "value"}, {}};
  t.rows = {{"model", label},
            {"a", format_report(model.a)},
            {"b", format_report(model.b)},
            {"horizon_months", std::to_string(horizon)},
            {"first", pred.series.start().to_string()},
            {"last", pred.series.last().to_string()}};
  b.tables.push_back(std::move(t));
  b.series.push_back({"forecast", {{"predicted", pred.series}}, true});
  b.notes = base_notes(c, manifest);
  finish(c, b);
  return pred;
}

BacktestReport cmd_backtest(const RunConfig& c, std::ostream& out) {
  require_out(c);
  const auto fr = c.fit_range();
  const auto er = c.eval_range();
  if (!fr || !er) {
    throw Error(ErrorCode::InvalidArgument,
                "backtest requires --fit-from/--fit-to and --eval-from/--eval-to");
  }
  const Inputs in = load_inputs(c);
  BacktestOptions bo;
  bo.method = c.method;
  if (c.method == FitMethod::Grid) bo.grid = effective_grid(c);
  bo.exclusions = c.exclusions();
  bo.allow_overlap = c.allow_overlap;
  std::string label = std::string(to_string(c.method));
  if (const Preset* p = preset_of(c)) {
    if (!p->proxy) {
      throw Error(ErrorCode::InvalidArgument,
                  "preset " + std::string(p->name) + " uses the gdp predictor");
    }
    bo.fixed = p->coefficients;
    label = "preset:" + std::string(p->name);
  }
  const BacktestReport rep = backtest(in.pyramid, in.index.levels, c.spec, *fr, *er, bo);

  out << "A = " << format_report(rep.fit.a) << "\n"
      << "B = " << format_report(rep.fit.b) << "\n"
      << "fit_rms = " << format_report(rep.fit.rms) << "\n"
      << "eval_range = " << rep.eval_range.from.to_string() << ".."
      << rep.eval_range.to.to_string() << "\n"
      << "n_eval = " << rep.n_eval << "\n"
      << "eval_rms = " << format_report(rep.eval_rms) << "\n"
      << "eval_mean = " << format_report(rep.eval_mean) << "\n"
      << "eval_std = " << format_report(rep.eval_std) << "\n"
      << "baseline_std = " << format_report(rep.baseline_std) << "\n";
  if (rep.overlapping) out << "warning: fit and evaluation windows overlap\n";

  io::ReportBundle b;
  io::Table t{"backtest", {"key", "value"}, {}};
  t.rows = {{"model", label},
            {"a", format_report(rep.fit.a)},
            {"b", format_report(rep.fit.b)},
            {"fit_from", rep.fit.fit_range.from.to_string()},
            {"fit_to", rep.fit.fit_range.to.to_string()},
            {"fit_rms", format_report(rep.fit.rms)},
            {"eval_from", rep.eval_range.from.to_string()},
            {"eval_to", rep.eval_range.to.to_string()},
            {"n_eval", std::to_string(rep.n_eval)},
            {"eval_rms", format_report(rep.eval_rms)},
            {"eval_mean", format_report(rep.eval_mean)},
            {"eval_std", format_report(rep.eval_std)},
            {"baseline_std", format_report(rep.baseline_std)},
            {"overlapping", rep.overlapping ? "true" : "false"}};
  b.tables.push_back(std::move(t));
  const MonthlySeries predicted = predict(in.rate, rep.fit.coefficients());
  auto [m, p] = align(in.measured, predicted);
  const MonthRange span{std::max(m.start(), rep.eval_range.from),
                        std::min(m.last(), rep.eval_range.to)};
  b.series.push_back({"backtest_eval",
                      {{"measured", m.slice(span.from, span.to)},
                       {"predicted", p.slice(span.from, span.to)}},
                      true});
  b.notes = base_notes(c, in.manifest);
  finish(c, b);
  return rep;
}

econ::BatteryReport cmd_cointegrate(const RunConfig& c, std::ostream& out) {
  require_out(c);
  const econ::Trend trend = [&] {
    if (c.trend == "rconstant") {
      throw Error(ErrorCode::InvalidArgument,
                  "--trend rconstant applies to Johansen only; unit-root tests take "
                  "none|constant|trend");
    }
    return econ::parse_trend(c.trend);
  }();
  if (c.max_lag < 0) throw Error(ErrorCode::InvalidArgument, "--max-lag must be >= 0");
  const Inputs in = load_inputs(c);
  const FitOutcome f = fit_model(c, in);
  const MonthlySeries predicted = predict(in.rate, f.fit.coefficients());
  auto [m, p] = align(in.measured, predicted);
  if (const auto fr = c.fit_range()) {
    const MonthKey from = std::max(fr->from, m.start());
    const MonthKey to = std::min(fr->to, m.last());
    if (to < from) throw Error(ErrorCode::OutOfRange, "fit range misses the common sample");
    m = m.slice(from, to);
    p = p.slice(from, to);
  }

  econ::BatteryOptions bo;
  bo.adf_max_lag = c.max_lag;
  bo.dfgls_max_lag = c.max_lag + 1;
  bo.unit_root_trend = trend;
  bo.lag_select_max = std::max(1, c.max_lag + 1);
  bo.johansen_lag = std::max(1, c.max_lag);
  bo.eg_max_lag = c.max_lag;
  const econ::BatteryReport rep = econ::run_battery(m.values(), p.values(), bo);

  io::ReportBundle b;
  io::Table lv = unit_root_table("unit_root_levels");
  add_unit_root_rows(lv, "measured", rep.adf_levels_measured);
  add_unit_root_rows(lv, "predicted", rep.adf_levels_predicted);
  add_unit_root_rows(lv, "measured", rep.dfgls_levels_measured);
  add_unit_root_rows(lv, "predicted", rep.dfgls_levels_predicted);
  io::Table df = unit_root_table("unit_root_differences");
  add_unit_root_rows(df, "measured", rep.adf_diff_measured);
  add_unit_root_rows(df, "predicted", rep.adf_diff_predicted);
  add_unit_root_rows(df, "measured", rep.dfgls_diff_measured);
  add_unit_root_rows(df, "predicted", rep.dfgls_diff_predicted);
  io::Table eg = unit_root_table("residual_unit_root");
  add_unit_root_rows(eg, "residual", rep.engle_granger.residual_tests);

  io::Table ls{"lag_selection",
               {"lag", "log_likelihood", "lr", "df", "p", "fpe", "aic", "hqic", "sbic"},
               {}};
  for (const auto& r : rep.lag_selection.rows) {
    ls.rows.push_back({std::to_string(r.lag), format_report(r.log_likelihood), opt_str(r.lr),
                       r.lr ? std::to_string(r.lr_df) : "", opt_str(r.lr_pvalue),
                       format_report(r.fpe), format_report(r.aic), format_report(r.hqic),
                       format_report(r.sbic)});
  }

  io::Table jo{"johansen", {"trend", "lag", "rank_le", "eigenvalue", "trace", "cv_5pct", "cv_source"},
               {}};
  for (const auto& j : rep.johansen) {
    for (std::size_t r = 0; r < j.trace.size(); ++r) {
      jo.rows.push_back({std::string(to_string(j.trend)), std::to_string(j.lag),
                         std::to_string(r), format_report(j.eigenvalues[r]),
                         format_report(j.trace[r]), format_report(j.critical_5pct[r].value),
                         j.critical_5pct[r].source});
    }
  }

  io::Table vf{"var_fit", {"equation", "r_squared", "rmse", "n_obs"}, {}};
  const char* names[] = {"measured", "predicted"};
  for (std::size_t i = 0; i < rep.var.equations.size() && i < 2; ++i) {
    vf.rows.push_back({names[i], format_report(rep.var.equations[i].r_squared),
                       format_report(rep.var.equations[i].rmse),
                       std::to_string(rep.var.equations[i].n_obs)});
  }
  vf.rows.push_back({"system", format_report(rep.var.system_r2),
                     format_report(rep.var.system_rmse), std::to_string(rep.var.n_obs)});

  const auto& ls_sel = rep.lag_selection;
  io::Table su{"summary", {"key", "value"}, {}};
  su.rows = {{"model", f.label},
             {"a", format_report(f.fit.a)},
             {"b", format_report(f.fit.b)},
             {"sample_from", m.start().to_string()},
             {"sample_to", m.last().to_string()},
             {"n_obs", std::to_string(rep.n_obs)},
             {"unit_root_trend", std::string(to_string(trend))},
             {"levels_integrated", rep.levels_integrated ? "true" : "false"},
             {"differences_stationary", rep.differences_stationary ? "true" : "false"},
             {"eg_stationary", rep.eg_stationary ? "true" : "false"},
             {"johansen_rank_constant", std::to_string(rep.johansen_rank)},
             {"lag_lr", std::to_string(ls_sel.lag_lr)},
             {"lag_fpe", std::to_string(ls_sel.lag_fpe)},
             {"lag_aic", std::to_string(ls_sel.lag_aic)},
             {"lag_hqic", std::to_string(ls_sel.lag_hqic)},
             {"lag_sbic", std::to_string(ls_sel.lag_sbic)},
             {"static_r_squared", format_report(rep.static_regression.r_squared)}};
  for (const auto& row : su.rows) out << row[0] << " = " << row[1] << "\n";

  b.tables = {std::move(lv), std::move(df), std::move(eg), std::move(ls), std::move(jo),
              std::move(vf), std::move(su)};
  b.series.push_back({"cointegration_sample", {{"measured", m}, {"predicted", p}}, true});
  b.notes = base_notes(c, in.manifest);
  finish(c, b);
  return rep;
}

std::vector<fs::path> cmd_synth(const RunConfig& c, std::ostream& out) {
  require_out(c);
  SynthConfig sc;
  sc.seed = c.seed;
  if (c.synth_start) sc.start = *c.synth_start;
  sc.months = c.synth_months;
  sc.spec = c.spec;
  if (const Preset* p = preset_of(c)) {
    if (!p->proxy) {
      throw Error(ErrorCode::InvalidArgument, "synth needs a proxy preset, not the gdp one");
    }
    sc.truth = p->coefficients;
  }
  sc.return_noise_sd = c.noise_sd;
  sc.population_noise_sd = c.population_noise_sd;
  const Fixtures fx = build_fixtures(sc);
  fs::create_directories(c.out);
  auto written = write_fixtures(fx, sc, c.out);
  for (const auto& p : written) out << p.generic_string() << "\n";
  return written;
}

std::vector<fs::path> cmd_report(const RunConfig& c, std::ostream& out) {
  require_out(c);
  Inputs in = load_inputs(c);
  const FitOutcome f = fit_model(c, in);
  print_fit(f, out);

  io::ReportBundle b;
  b.tables.push_back(fit_table(f));
  b.series.push_back({"annual_vs_cumulative",
                      {{"annual_ratio", annual_ratio_return(in.index.levels)},
                       {"cumulative_12m", in.measured}},
                      true});
  b.series.push_back({"monthly_returns", {{"monthly", monthly_return(in.index.levels)}}, true});
  add_fit_series(b, in, f);
  b.series.push_back({"change_rate",
                      {{"single_age", dln(extract_age(in.pyramid, c.spec.center_age))},
                       {"proxy", in.rate}},
                      true});

  if (!c.gdp.empty()) {
    const QuarterlySeries g = io::load_gdp(c.gdp);
    in.manifest.add_gdp(c.gdp, g);
    const Preset& gp = find_preset("gdp");
    const MonthlySeries gpred = gdp_predict(g, gp.coefficients.a, gp.coefficients.b);
    auto [m, p] = align(in.measured, gpred);
    b.series.push_back({"gdp_returns", {{"measured", m}, {"gdp_predicted", p}}, true});
    const MonthlySeries r = residuals(m, p);
    double ss = 0.0;
    for (double v : r.values()) ss += v * v;
    b.tables.push_back({"gdp_model",
                        {"key", "value"},
                        {{"a", format_report(gp.coefficients.a)},
                         {"b", format_report(gp.coefficients.b)},
                         {"n_obs", std::to_string(r.size())},
                         {"rms", format_report(std::sqrt(ss / static_cast<double>(r.size())))}}});
  }
  b.notes = base_notes(c, in.manifest);
  auto written = finish(c, b);
  for (const auto& p : written) out << "wrote " << p.generic_string() << "\n";
  return written;
}

}  // namespace demotrend::app
