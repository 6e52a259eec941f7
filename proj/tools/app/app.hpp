#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "demotrend/battery.hpp"
#include "demotrend/io.hpp"
#include "demotrend/model.hpp"
#include "demotrend/population.hpp"

namespace demotrend::app {

// ---------------------------------------------------------------------------
// Synthetic fixtures with a declared ground truth.

struct SynthConfig {
  std::uint64_t seed = 42;
  MonthKey start{1985, 1};
  std::size_t months = 240;
  int min_age = 0;
  int max_age = 20;
  ProxySpec spec{};                   // proxy the truth is generated through
  Coefficients truth{170.0, -0.04};
  double return_noise_sd = 0.0;       // Gaussian residual added to returns
  double population_noise_sd = 0.0;   // log-noise on every pyramid cell
};

struct Fixtures {
  AgePyramid pyramid;
  MonthlySeries prices;
  QuarterlySeries gdp;
  MonthlySeries rate;      // the proxy change rate the truth was built from
  MonthlySeries measured;  // 12-month returns implied by `prices`
};

/// Pyramid with a smooth, seeded common growth path; index levels whose
/// 12-month cumulative returns equal truth.a * rate + truth.b + noise;
/// GDP growth that tracks those returns.
Fixtures build_fixtures(const SynthConfig& config);

/// Write population.csv, index.csv, gdp.csv and truth.txt.
std::vector<std::filesystem::path> write_fixtures(const Fixtures& f, const SynthConfig& config,
                                                  const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Validated invocation settings shared by every subcommand.

struct RunConfig {
  std::string subcommand;
  std::filesystem::path population;
  std::filesystem::path index;
  std::filesystem::path gdp;
  std::filesystem::path out;
  std::uint64_t seed = 42;
  std::optional<std::string> preset;
  ProxySpec spec{};
  FitMethod method = FitMethod::Ols;
  GridLattice grid;
  std::optional<MonthKey> fit_from, fit_to, eval_from, eval_to, exclude_from, exclude_to;
  std::string trend = "constant";
  int max_lag = 3;
  bool allow_overlap = false;
  bool plots = true;
  std::optional<long> horizon_months;
  // synth
  std::optional<MonthKey> synth_start;
  std::size_t synth_months = 240;
  double noise_sd = 0.0;
  double population_noise_sd = 0.0;

  std::optional<MonthRange> fit_range() const;
  std::optional<MonthRange> eval_range() const;
  std::vector<MonthRange> exclusions() const;
};

/// Command results, returned so tests can inspect them without parsing output.
struct FitOutcome {
  ModelFit fit;
  std::string label;  // "ols", "grid" or "preset:<name>"
};

FitOutcome cmd_fit(const RunConfig& config, std::ostream& out);
Prediction cmd_forecast(const RunConfig& config, std::ostream& out);
BacktestReport cmd_backtest(const RunConfig& config, std::ostream& out);
econ::BatteryReport cmd_cointegrate(const RunConfig& config, std::ostream& out);
std::vector<std::filesystem::path> cmd_synth(const RunConfig& config, std::ostream& out);
std::vector<std::filesystem::path> cmd_report(const RunConfig& config, std::ostream& out);

/// Parse argv (argv[0] is the program name), run the subcommand, report
/// failures on `err`. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace demotrend::app
