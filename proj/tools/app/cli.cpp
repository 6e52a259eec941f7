#include <algorithm>
#include <array>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "app/app.hpp"

namespace demotrend::app {

namespace {

struct RawFlags {
  std::string population, index, gdp, out, preset, method = "ols", trend = "constant";
  std::uint64_t seed = 42;
  int center_age = 9, half_width = 2, month_window = 1, max_lag = 3;
  long shift_months = 0, horizon_months = 0;
  std::string fit_from, fit_to, eval_from, eval_to, exclude_from, exclude_to;
  std::string grid_a = "0:300:1", grid_b = "-0.3:0.3:0.001";
  std::string start = "1985-01";
  std::size_t months = 240;
  double noise_sd = 0.0, population_noise_sd = 0.0;
  bool allow_overlap = false, no_plots = false;
};

struct Options {
  CLI::Option* center_age = nullptr;
  CLI::Option* half_width = nullptr;
  CLI::Option* month_window = nullptr;
  CLI::Option* shift_months = nullptr;
  CLI::Option* horizon = nullptr;
  CLI::Option* start = nullptr;
};

enum Group : unsigned {
  kInputs = 1, kProxy = 2, kFit = 4, kEval = 8, kCoint = 16, kGdp = 32, kSynth = 64,
  kHorizon = 128
};

void add_options(CLI::App* sub, RawFlags& f, Options& o, unsigned groups) {
  sub->add_option("--out", f.out, "output directory")->envname("DEMOTREND_OUT");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--preset", f.preset, "named coefficient preset");
  if (groups & kInputs) {
    sub->add_option("--population", f.population, "population CSV");
    sub->add_option("--index", f.index, "index level CSV");
    sub->add_flag("--no-plots", f.no_plots, "skip SVG output");
  }
  if (groups & kGdp) sub->add_option("--gdp", f.gdp, "quarterly GDP growth CSV");
  if (groups & kProxy) {
    o.center_age = sub->add_option("--center-age", f.center_age, "proxy center age");
    o.half_width = sub->add_option("--half-width", f.half_width, "ages either side of center");
    o.month_window = sub->add_option("--month-window", f.month_window, "moving-average months");
    o.shift_months = sub->add_option("--shift-months", f.shift_months, "proxy lead in months");
  }
  if (groups & kFit) {
    sub->add_option("--fit-from", f.fit_from, "first fit month YYYY-MM");
    sub->add_option("--fit-to", f.fit_to, "last fit month YYYY-MM");
    sub->add_option("--exclude-from", f.exclude_from, "first excluded month");
    sub->add_option("--exclude-to", f.exclude_to, "last excluded month");
    sub->add_option("--method", f.method, "ols|grid")
        ->check(CLI::IsMember({"ols", "grid"}));
    sub->add_option("--grid-a", f.grid_a, "A lattice min:max:step");
    sub->add_option("--grid-b", f.grid_b, "B lattice min:max:step");
  }
  if (groups & kEval) {
    sub->add_option("--eval-from", f.eval_from, "first evaluation month");
    sub->add_option("--eval-to", f.eval_to, "last evaluation month");
    sub->add_flag("--allow-overlap", f.allow_overlap, "permit fit/eval overlap");
  }
  if (groups & kCoint) {
    sub->add_option("--trend", f.trend, "none|constant|rconstant|trend")
        ->check(CLI::IsMember({"none", "constant", "rconstant", "trend"}));
    sub->add_option("--max-lag", f.max_lag, "largest lag");
  }
  if (groups & kHorizon) {
    o.horizon = sub->add_option("--horizon-months", f.horizon_months, "forecast horizon");
  }
  if (groups & kSynth) {
    o.start = sub->add_option("--start", f.start, "first pyramid month");
    sub->add_option("--months", f.months, "pyramid length in months");
    sub->add_option("--noise-sd", f.noise_sd, "return noise sd");
    sub->add_option("--population-noise-sd", f.population_noise_sd, "pyramid log-noise sd");
  }
  for (CLI::Option* opt : sub->get_options()) {
    if (opt->get_name() != "--help") opt->take_last();
  }
}

std::optional<MonthKey> month_flag(const std::string& text, std::string_view flag) {
  if (text.empty()) return std::nullopt;
  try {
    return MonthKey::parse(text);
  } catch (const Error& e) {
    throw Error(ErrorCode::InvalidArgument, std::string(flag) + ": " + e.what());
  }
}

std::array<double, 3> triple(const std::string& text, std::string_view flag) {
  std::array<double, 3> v{};
  std::istringstream in(text);
  std::string part;
  std::size_t i = 0;
  while (std::getline(in, part, ':')) {
    if (i == 3) break;
    try {
      std::size_t used = 0;
      v[i] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string(flag) + ": expected min:max:step, got '" + text + "'");
    }
    ++i;
  }
  if (i != 3 || in.rdbuf()->in_avail() > 0) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(flag) + ": expected min:max:step, got '" + text + "'");
  }
  return v;
}

// key=value lines, '#' comments. Keys are long flag names without dashes.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::Parse,
                  path + ":" + std::to_string(n) + ": expected key=value");
    }
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    if (kv.back().first.empty()) {
      throw Error(ErrorCode::Parse, path + ":" + std::to_string(n) + ": empty key");
    }
  }
  return kv;
}

RunConfig finalize(const std::string& name, const RawFlags& f, const Options& o) {
  RunConfig c;
  c.subcommand = name;
  c.population = f.population;
  c.index = f.index;
  c.gdp = f.gdp;
  c.out = f.out;
  c.seed = f.seed;
  if (!f.preset.empty()) {
    const Preset& p = find_preset(f.preset);
    c.preset = std::string(p.name);
    if (p.proxy) c.spec = *p.proxy;
  }
  // Explicit proxy flags override the preset's proxy.
  if (o.center_age && o.center_age->count()) c.spec.center_age = f.center_age;
  if (o.half_width && o.half_width->count()) c.spec.half_width = f.half_width;
  if (o.month_window && o.month_window->count()) c.spec.month_window = f.month_window;
  if (o.shift_months && o.shift_months->count()) c.spec.time_shift = f.shift_months;
  if (c.spec.half_width < 0) throw Error(ErrorCode::InvalidArgument, "--half-width must be >= 0");
  if (c.spec.month_window < 1) {
    throw Error(ErrorCode::InvalidArgument, "--month-window must be >= 1");
  }
  c.method = parse_fit_method(f.method);
  if (c.method == FitMethod::Grid) {
    const auto a = triple(f.grid_a, "--grid-a");
    const auto b = triple(f.grid_b, "--grid-b");
    c.grid = GridLattice::uniform(a[0], a[1], a[2], b[0], b[1], b[2]);
  }
  c.fit_from = month_flag(f.fit_from, "--fit-from");
  c.fit_to = month_flag(f.fit_to, "--fit-to");
  c.eval_from = month_flag(f.eval_from, "--eval-from");
  c.eval_to = month_flag(f.eval_to, "--eval-to");
  c.exclude_from = month_flag(f.exclude_from, "--exclude-from");
  c.exclude_to = month_flag(f.exclude_to, "--exclude-to");
  // Surface half-given pairs before any file is read.
  (void)c.fit_range();
  (void)c.eval_range();
  (void)c.exclusions();
  c.trend = f.trend;
  c.max_lag = f.max_lag;
  c.allow_overlap = f.allow_overlap;
  c.plots = !f.no_plots;
  if (o.horizon && o.horizon->count()) c.horizon_months = f.horizon_months;
  if (o.start) c.synth_start = month_flag(f.start, "--start");
  c.synth_months = f.months;
  c.noise_sd = f.noise_sd;
  c.population_noise_sd = f.population_noise_sd;
  if (c.out.empty()) c.out = "demotrend-out";
  return c;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"demotrend: demographic proxies for long-horizon equity returns", "demotrend"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "demotrend 0.1.0");

  RawFlags f;
  std::map<std::string, Options> opts;
  const std::vector<std::pair<std::string, unsigned>> subs = {
      {"synth", kProxy | kSynth},
      {"fit", kInputs | kProxy | kFit},
      {"forecast", kInputs | kProxy | kFit | kHorizon},
      {"backtest", kInputs | kProxy | kFit | kEval},
      {"cointegrate", kInputs | kProxy | kFit | kCoint},
      {"report", kInputs | kProxy | kFit | kGdp},
  };
  const std::map<std::string, std::string> help = {
      {"synth", "write synthetic population/index/gdp fixtures with known truth"},
      {"fit", "estimate A and B on a fit window"},
      {"forecast", "predict returns beyond the last index month"},
      {"backtest", "fit on one window, score on another"},
      {"cointegrate", "unit-root, lag-selection, Engle-Granger and Johansen battery"},
      {"report", "fit plus the full figure set"},
  };
  std::string config_path;
  for (const auto& [name, groups] : subs) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    add_options(sub, f, opts[name], groups);
    sub->add_option("--config", config_path, "key=value defaults file")->take_last();
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // Config values go in front of the command-line flags so the latter win.
    std::string cfg;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) cfg = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) cfg = args[i].substr(9);
    }
    if (!cfg.empty()) {
      const auto sub_pos = std::find_if(args.begin(), args.end(),
                                        [&](const std::string& a) { return opts.count(a) > 0; });
      if (sub_pos == args.end()) {
        throw Error(ErrorCode::InvalidArgument, "--config needs a subcommand");
      }
      CLI::App* sub = app.get_subcommand(*sub_pos);
      std::vector<std::string> extra;
      for (const auto& [key, value] : read_config(cfg)) {
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt == nullptr || key == "config" || key == "help") {
          throw Error(ErrorCode::InvalidArgument,
                      "config key '" + key + "' is not an option of " + *sub_pos);
        }
        if (opt->get_type_size() == 0) {
          if (value == "true" || value == "1") {
            extra.push_back("--" + key);
          } else if (value != "false" && value != "0") {
            throw Error(ErrorCode::InvalidArgument,
                        "config key '" + key + "' expects true or false");
          }
        } else {
          extra.push_back("--" + key);
          extra.push_back(value);
        }
      }
      args.insert(sub_pos + 1, extra.begin(), extra.end());
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  try {
    const RunConfig c = finalize(name, f, opts.at(name));
    if (name == "synth") cmd_synth(c, out);
    else if (name == "fit") cmd_fit(c, out);
    else if (name == "forecast") cmd_forecast(c, out);
    else if (name == "backtest") cmd_backtest(c, out);
    else if (name == "cointegrate") cmd_cointegrate(c, out);
    else cmd_report(c, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::InvalidArgument ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace demotrend::app
