#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "demotrend/econometrics.hpp"
#include "demotrend/model.hpp"

using namespace demotrend;

namespace {

std::vector<double> walk(std::size_t n, std::uint64_t seed) {
  boost::random::mt19937_64 rng(seed);
  boost::random::normal_distribution<double> z;
  std::vector<double> y(n);
  double v = 0.0;
  for (auto& x : y) x = v += z(rng);
  return y;
}

Eigen::MatrixXd pair(std::size_t n) {
  const auto a = walk(n, 1);
  const auto e = walk(n, 2);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    m(static_cast<Eigen::Index>(i), 0) = a[i];
    m(static_cast<Eigen::Index>(i), 1) = 0.9 * a[i] + 0.1 * e[i];
  }
  return m;
}

void BM_Ols(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd X = Eigen::MatrixXd::Random(n, 4);
  const Eigen::VectorXd y = X * Eigen::Vector4d(1, -2, 0.5, 3) + 0.1 * Eigen::VectorXd::Random(n);
  for (auto _ : state) benchmark::DoNotOptimize(econ::ols(y, X, true));
}
BENCHMARK(BM_Ols)->Arg(207)->Arg(2000);

void BM_AdfLags(benchmark::State& state) {
  const auto y = walk(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(econ::adf(y, 4, econ::Trend::Constant));
}
BENCHMARK(BM_AdfLags)->Arg(207)->Arg(2000);

void BM_Johansen(benchmark::State& state) {
  const auto m = pair(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(econ::johansen(m, 3, econ::JohansenTrend::Constant));
}
BENCHMARK(BM_Johansen)->Arg(207)->Arg(2000);

void BM_GridFit(benchmark::State& state) {
  const MonthKey start(1985, 1);
  std::vector<double> rate(240), measured(240);
  for (std::size_t i = 0; i < rate.size(); ++i) {
    rate[i] = 0.001 * std::sin(0.1 * static_cast<double>(i));
    measured[i] = 170.0 * rate[i] - 0.04;
  }
  const MonthlySeries r(start, rate, Unit::LogDifference);
  const MonthlySeries m(start, measured, Unit::Return);
  FitOptions fo;
  fo.method = FitMethod::Grid;
  fo.grid = GridLattice::uniform(0, 300, 1, -0.3, 0.3, 0.001 * static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit(m, r, fo));
}
// Lattice B step in thousandths: 10 -> ~18k points, 1 -> ~180k points.
BENCHMARK(BM_GridFit)->Arg(10)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
