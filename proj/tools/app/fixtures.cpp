#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "app/app.hpp"

namespace demotrend::app {

namespace fs = std::filesystem;

namespace {

// Independent streams per purpose, all derived from the one user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> common_growth_path(std::uint64_t seed, std::size_t months) {
  boost::random::mt19937_64 engine(derive_seed(seed, 1));
  boost::random::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  const double phi1 = phase(engine);
  const double phi2 = phase(engine);
  std::vector<double> path(months, 0.0);
  double ar = 0.0;
  for (std::size_t k = 1; k < months; ++k) {
    const double t = static_cast<double>(k);
    ar = 0.9 * ar + 0.00015 * normal(engine);
    path[k] = 0.0009 * std::sin(2.0 * std::numbers::pi * t / 66.0 + phi1) +
              0.0005 * std::sin(2.0 * std::numbers::pi * t / 23.0 + phi2) + ar;
  }
  return path;
}

}  // namespace

Fixtures build_fixtures(const SynthConfig& config) {
  if (config.months < 48) {
    throw Error(ErrorCode::InvalidArgument, "synth: need at least 48 months");
  }
  if (!(config.return_noise_sd >= 0.0) || !(config.population_noise_sd >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "synth: noise levels must be >= 0");
  }
  const auto n_ages = static_cast<std::size_t>(config.max_age - config.min_age + 1);

  PyramidSynthesis ps;
  ps.seed = derive_seed(config.seed, 0);
  ps.first_month = config.start;
  ps.n_months = config.months;
  ps.min_age = config.min_age;
  ps.max_age = config.max_age;
  for (std::size_t a = 0; a < n_ages; ++a) {
    ps.base_counts.push_back(3.8e6 + 40000.0 * (static_cast<double>(a) - 10.0));
    ps.monthly_growth_by_age.push_back(0.0001);
  }
  ps.common_growth = common_growth_path(config.seed, config.months);
  ps.noise_sd = config.population_noise_sd;
  AgePyramid pyramid = synthesize_pyramid(ps);

  const MonthlySeries rate = n9_change_rate(pyramid, config.spec);
  const MonthKey r_first = rate.start();
  const MonthKey r_last = std::min(rate.last(), pyramid.last_month());
  if (r_last < r_first || r_last.months_since(r_first) + 1 < 24) {
    throw Error(ErrorCode::InvalidArgument,
                "synth: proxy leaves fewer than 24 months for the index");
  }
  const MonthlySeries used_rate = rate.slice(r_first, r_last);

  // Target 12-month returns.
  boost::random::mt19937_64 engine(derive_seed(config.seed, 2));
  boost::random::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> target(used_rate.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    target[i] = config.truth.a * used_rate[i] + config.truth.b;
    if (config.return_noise_sd > 0.0) target[i] += config.return_noise_sd * normal(engine);
  }

  // Monthly returns whose trailing 12-month sums hit the targets: the first
  // window is spread evenly, then r_{k+11} = R_k - R_{k-1} + r_{k-1}.
  const std::size_t n = target.size();
  std::vector<double> monthly(n + 11);
  for (std::size_t j = 0; j < 12; ++j) monthly[j] = target[0] / 12.0;
  for (std::size_t k = 1; k < n; ++k) monthly[k + 11] = target[k] - target[k - 1] + monthly[k - 1];

  std::vector<double> levels(n + 12);
  levels[0] = 100.0;
  for (std::size_t j = 0; j < monthly.size(); ++j) {
    if (!(monthly[j] > -1.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "synth: generated monthly return below -100%; lower the noise");
    }
    levels[j + 1] = levels[j] * (1.0 + monthly[j]);
  }
  MonthlySeries prices(r_first.plus(-12), std::move(levels), Unit::IndexPoints);
  MonthlySeries measured = measured_returns(prices);

  // GDP growth over whole quarters of the measured range.
  MonthKey q_first = measured.start();
  while ((q_first.month() - 1) % 3 != 0) q_first = q_first.next();
  std::vector<double> growth;
  for (MonthKey m = q_first; m.plus(2) <= measured.last(); m = m.plus(3)) {
    const double mean = (measured.at(m) + measured.at(m.plus(1)) + measured.at(m.plus(2))) / 3.0;
    growth.push_back((mean + 0.25) / 10.0);
  }
  if (growth.empty()) {
    throw Error(ErrorCode::InvalidArgument, "synth: index range holds no complete quarter");
  }
  QuarterlySeries gdp(QuarterKey{q_first.year(), (q_first.month() - 1) / 3 + 1}, std::move(growth),
                      QuarterlyUnit::GrowthRate);

  return Fixtures{std::move(pyramid), std::move(prices), std::move(gdp), used_rate,
                  std::move(measured)};
}

std::vector<fs::path> write_fixtures(const Fixtures& f, const SynthConfig& config,
                                     const fs::path& dir) {
  const fs::path pop = dir / "population.csv";
  const fs::path idx = dir / "index.csv";
  const fs::path gdp = dir / "gdp.csv";
  const fs::path truth = dir / "truth.txt";
  io::write_population(pop, f.pyramid);
  io::write_index(idx, f.prices, io::PriceConvention::Close);
  io::write_gdp(gdp, f.gdp);

  std::string t = "# demotrend synthetic ground truth\n";
  t += "seed: " + std::to_string(config.seed) + "\n";
  t += "start: " + config.start.to_string() + "\n";
  t += "months: " + std::to_string(config.months) + "\n";
  t += "ages: " + std::to_string(config.min_age) + ".." + std::to_string(config.max_age) + "\n";
  t += "proxy: center_age=" + std::to_string(config.spec.center_age) +
       " half_width=" + std::to_string(config.spec.half_width) +
       " month_window=" + std::to_string(config.spec.month_window) +
       " time_shift=" + std::to_string(config.spec.time_shift) + "\n";
  t += "a: " + io::format_exact(config.truth.a) + "\n";
  t += "b: " + io::format_exact(config.truth.b) + "\n";
  t += "return_noise_sd: " + io::format_exact(config.return_noise_sd) + "\n";
  t += "population_noise_sd: " + io::format_exact(config.population_noise_sd) + "\n";
  t += "index_range: " + f.prices.start().to_string() + ".." + f.prices.last().to_string() + "\n";
  {
    std::ofstream out(truth, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + truth.string());
    out << t;
  }
  return {pop, idx, gdp, truth};
}

}  // namespace demotrend::app
