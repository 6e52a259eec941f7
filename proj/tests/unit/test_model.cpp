#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "app/app.hpp"
#include "demotrend/model.hpp"
#include "dgp.hpp"

using namespace demotrend;

namespace {

const MonthKey kStart{1990, 1};

std::vector<double> vec(const MonthlySeries& s) { return {s.values().begin(), s.values().end()}; }

MonthlySeries random_rate(std::uint64_t seed, std::size_t n, double sd = 0.001) {
  auto rng = dgp::rng_for(seed, 300);
  std::vector<double> r;
  for (std::size_t i = 0; i < n; ++i) r.push_back(sd * dgp::draw(rng));
  return {kStart, r, Unit::LogDifference};
}

MonthlySeries add_noise(const MonthlySeries& s, std::uint64_t seed, double sd) {
  auto rng = dgp::rng_for(seed, 301);
  std::vector<double> v = vec(s);
  for (double& x : v) x += sd * dgp::draw(rng);
  return {s.start(), v, s.unit()};
}

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::Io;
}

}  // namespace

TEST(Presets, PublishedCoefficients) {
  const struct {
    const char* name;
    double a, b;
  } expected[] = {{"postcensal-1990s", 170, -0.04}, {"intercensal", 165, -0.055},
                  {"7yo-horizon", 165, -0.061},     {"17yo-back", 35, 0.089},
                  {"post-2005", 30, -0.1},          {"gdp", 10.0, -0.25}};
  EXPECT_EQ(presets().size(), 6u);
  for (const auto& e : expected) {
    const Preset& p = find_preset(e.name);
    EXPECT_EQ(p.coefficients.a, e.a) << e.name;
    EXPECT_EQ(p.coefficients.b, e.b) << e.name;
  }
  EXPECT_EQ(find_preset("7yo-horizon").proxy, (ProxySpec{7, 2, 24, 1}));
  EXPECT_EQ(find_preset("17yo-back").proxy, (ProxySpec{17, 0, -96, 4}));
  EXPECT_EQ(find_preset("post-2005").proxy->time_shift, 72);
  EXPECT_FALSE(find_preset("gdp").proxy.has_value());
  EXPECT_EQ(code_of([] { find_preset("nope"); }), ErrorCode::InvalidArgument);
}

TEST(Predict, ZeroRateGivesB) {
  for (double v : vec(predict(MonthlySeries(kStart, std::vector<double>(7, 0.0), Unit::LogDifference),
                              170, -0.04))) {
    EXPECT_EQ(v, -0.04);
  }
}

TEST(Predict, Arithmetic) {
  for (double v : vec(predict(MonthlySeries(kStart, std::vector<double>(7, 0.001), Unit::LogDifference),
                              170, -0.04))) {
    EXPECT_NEAR(v, 0.13, 1e-15);
  }
}

TEST(Predict, AffineOracleAndProperties) {
  const auto r = random_rate(1, 50);
  const auto p = predict(r, 170, -0.04);
  const auto p0 = predict(r, 170, 0.0);
  std::vector<double> doubled = vec(r);
  for (double& x : doubled) x *= 2.0;
  const auto p2 = predict(MonthlySeries(kStart, doubled, Unit::LogDifference), 170, -0.04);
  for (std::size_t i = 0; i < r.size(); ++i) {
    EXPECT_NEAR(p[i], 170.0 * r[i] - 0.04, 1e-15);
    EXPECT_NEAR(p[i] - p0[i], -0.04, 1e-15);
    EXPECT_NEAR(p2[i] - p[i], 170.0 * r[i], 1e-14);
  }
  EXPECT_EQ(p.unit(), Unit::Return);
  EXPECT_EQ(code_of([&] { predict(r, NAN, 0.0); }), ErrorCode::InvalidArgument);
}

TEST(Fit, NoiselessInversionOls) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = random_rate(seed, 60);
    const auto f = fit(predict(r, 170, -0.04), r, FitOptions{});
    EXPECT_NEAR(f.a, 170.0, 1e-9);
    EXPECT_NEAR(f.b, -0.04, 1e-9);
    EXPECT_LE(f.rms, 1e-9);
    EXPECT_EQ(f.n_obs, 60u);
    EXPECT_EQ(f.method, FitMethod::Ols);
  }
}

TEST(Fit, GridFindsPublishedPairOnNoiselessData) {
  const auto r = random_rate(2, 80);
  FitOptions fo;
  fo.method = FitMethod::Grid;
  fo.grid = GridLattice::uniform(160, 180, 1, -0.06, -0.02, 0.001);
  const auto f = fit(predict(r, 170, -0.04), r, fo);
  EXPECT_EQ(f.a, 170.0);
  EXPECT_NEAR(f.b, -0.04, 1e-12);
  EXPECT_LT(f.rms, 1e-12);
}

TEST(Fit, GridTiesBreakToSmallestAThenB) {
  // rate == 0: every A fits equally; B is pinned by the data.
  const MonthlySeries zero(kStart, std::vector<double>(30, 0.0), Unit::LogDifference);
  const MonthlySeries measured(kStart, std::vector<double>(30, 0.0), Unit::Return);
  FitOptions fo;
  fo.method = FitMethod::Grid;
  fo.grid.a_values = {5, 3, 9};
  fo.grid.b_values = {0.1, -0.1};  // rms equal for both: tie -> smallest B
  const auto f = fit(measured, zero, fo);
  EXPECT_EQ(f.a, 3.0);
  EXPECT_EQ(f.b, -0.1);
}

TEST(Fit, GridRmsNeverBelowOls) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto r = random_rate(seed, 100);
    const auto m = add_noise(predict(r, 150, 0.02), seed, 0.03);
    FitOptions g;
    g.method = FitMethod::Grid;
    g.grid = GridLattice::uniform(100, 200, 2, -0.05, 0.05, 0.005);
    EXPECT_GE(fit(m, r, g).rms, fit(m, r, FitOptions{}).rms);
  }
}

TEST(Fit, OlsResidualsCenteredAndOrthogonal) {
  const auto r = random_rate(3, 150);
  const auto m = add_noise(predict(r, 170, -0.04), 3, 0.02);
  const auto f = fit(m, r, FitOptions{});
  EXPECT_LE(std::fabs(f.mean_resid), 1e-9);
  EXPECT_GE(f.rms * f.rms, f.mean_resid * f.mean_resid);
  const auto res = residuals(m, predict(r, f.a, f.b));
  double dot = 0.0, norm_r = 0.0, norm_e = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    dot += res[i] * r[i];
    norm_r += r[i] * r[i];
    norm_e += res[i] * res[i];
  }
  EXPECT_LE(std::fabs(dot) / std::sqrt(norm_r * norm_e), 1e-6);
}

TEST(Fit, RangeAndExclusions) {
  const auto r = random_rate(4, 120);
  auto m = vec(predict(r, 170, -0.04));
  // Corrupt a window, then exclude it: inversion stays exact.
  for (std::size_t i = 40; i < 56; ++i) m[i] += 0.5;
  const MonthlySeries measured(kStart, m, Unit::Return);
  FitOptions fo;
  fo.exclusions = {{kStart.plus(40), kStart.plus(55)}};
  const auto f = fit(measured, r, fo);
  EXPECT_NEAR(f.a, 170.0, 1e-9);
  EXPECT_EQ(f.n_obs, 104u);

  fo.exclusions.clear();
  fo.range = MonthRange{kStart.plus(60), kStart.plus(119)};
  const auto g = fit(measured, r, fo);
  EXPECT_NEAR(g.a, 170.0, 1e-9);
  EXPECT_EQ(g.fit_range.from, kStart.plus(60));
  EXPECT_EQ(g.n_obs, 60u);
}

TEST(Fit, Errors) {
  const auto r = random_rate(5, 30);
  const auto m = predict(r, 1, 0);
  FitOptions fo;
  fo.range = MonthRange{kStart, kStart.plus(10)};
  EXPECT_EQ(code_of([&] { fit(m, r, fo); }), ErrorCode::InvalidArgument);
  fo.range = MonthRange{kStart.plus(40), kStart.plus(50)};
  EXPECT_EQ(code_of([&] { fit(m, r, fo); }), ErrorCode::OutOfRange);
  const MonthlySeries flat(kStart, std::vector<double>(30, 0.001), Unit::LogDifference);
  EXPECT_EQ(code_of([&] { fit(m, flat, FitOptions{}); }), ErrorCode::Degenerate);
  FitOptions grid;
  grid.method = FitMethod::Grid;
  EXPECT_EQ(code_of([&] { fit(m, r, grid); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { GridLattice::uniform(1, 0, 1, 0, 1, 1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { GridLattice::uniform(0, 1, 0, 0, 1, 1); }), ErrorCode::InvalidArgument);
}

TEST(Evaluate, FixedCoefficients) {
  const auto r = random_rate(6, 40);
  const auto m = predict(r, 170, -0.04);
  const auto e = evaluate(m, r, {170, -0.04}, FitOptions{});
  EXPECT_TRUE(e.fixed);
  EXPECT_EQ(e.a, 170.0);
  EXPECT_LT(e.rms, 1e-15);
  const auto off = evaluate(m, r, {170, -0.03}, FitOptions{});
  EXPECT_NEAR(off.rms, 0.01, 1e-12);
  EXPECT_NEAR(off.mean_resid, -0.01, 1e-12);
}

TEST(GdpPredict, ZeroCrossingAndArithmetic) {
  const QuarterlySeries flat({2000, 1}, std::vector<double>(6, 0.025), QuarterlyUnit::GrowthRate);
  const auto p = gdp_predict(flat);
  EXPECT_EQ(p.start(), MonthKey(2000, 7));
  EXPECT_EQ(p.size(), 15u);
  for (double v : vec(p)) EXPECT_NEAR(v, 0.0, 1e-15);
  const QuarterlySeries four({2000, 1}, std::vector<double>(4, 0.04), QuarterlyUnit::GrowthRate);
  for (double v : vec(gdp_predict(four))) EXPECT_NEAR(v, 0.15, 1e-15);
}

TEST(GdpPredict, AlternatingQuartersRollingMean) {
  std::vector<double> g;
  for (int i = 0; i < 10; ++i) g.push_back(i % 2 == 0 ? 0.02 : 0.03);
  const auto p = gdp_predict(QuarterlySeries({1995, 3}, g, QuarterlyUnit::GrowthRate));
  for (std::size_t m = 0; m < p.size(); ++m) {
    const std::size_t j = m / 3 + 2;  // predicted quarter index
    const double oracle = 10.0 * 0.5 * (g[j - 1] + g[j - 2]) - 0.25;
    EXPECT_NEAR(p[m], oracle, 1e-15);
    EXPECT_NEAR(p[m], 0.0, 1e-15);
  }
}

TEST(GdpPredict, Errors) {
  EXPECT_EQ(code_of([] { gdp_predict(QuarterlySeries({2000, 1}, {0.1}, QuarterlyUnit::GrowthRate)); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { gdp_predict(QuarterlySeries({2000, 1}, {1, 2}, QuarterlyUnit::Level)); }),
            ErrorCode::InvalidArgument);
}

TEST(Cumulate, Trivial) {
  for (double v : vec(cumulate(MonthlySeries(kStart, std::vector<double>(9, 0.0), Unit::Return)))) {
    EXPECT_EQ(v, 0.0);
  }
  const auto c = cumulate(MonthlySeries(kStart, std::vector<double>(12, 0.01), Unit::Return));
  EXPECT_NEAR(c[11], 0.12, 1e-15);
  EXPECT_EQ(code_of([] { cumulate(MonthlySeries(kStart, {1.0}, Unit::Persons)); }),
            ErrorCode::InvalidArgument);
}

TEST(Cumulate, DifferenceOfCumulatesIsCumulatedResidual) {
  const auto r = random_rate(7, 90);
  const auto p = predict(r, 170, -0.04);
  const auto m = add_noise(p, 7, 0.02);
  const auto lhs_m = cumulate(m), lhs_p = cumulate(p), rhs = cumulate(residuals(m, p));
  for (std::size_t i = 0; i < rhs.size(); ++i) EXPECT_NEAR(lhs_m[i] - lhs_p[i], rhs[i], 1e-12);
}

TEST(Cumulate, NoiselessResidualIsZero) {
  const auto fx = app::build_fixtures(app::SynthConfig{});
  auto [m, p] = align(fx.measured, predict(fx.rate, 170, -0.04));
  for (double v : vec(cumulate(residuals(m, p)))) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Backtest, EvalEqualsFitOnNoiselessData) {
  const auto fx = app::build_fixtures(app::SynthConfig{});
  const MonthRange window{MonthKey{1986, 1}, MonthKey{2004, 12}};
  BacktestOptions bo;
  bo.allow_overlap = true;
  const auto rep = backtest(fx.pyramid, fx.prices, ProxySpec{}, window, window, bo);
  EXPECT_TRUE(rep.overlapping);
  EXPECT_LT(rep.eval_rms, 1e-12);
  EXPECT_NEAR(rep.fit.a, 170.0, 1e-9);
  EXPECT_GT(rep.baseline_std, 0.0);
}

TEST(Backtest, DisjointWindowsAndOverlapGuard) {
  app::SynthConfig sc;
  sc.return_noise_sd = 0.02;
  const auto fx = app::build_fixtures(sc);
  const MonthRange fr{MonthKey{1986, 1}, MonthKey{1994, 12}};
  const MonthRange er{MonthKey{1995, 1}, MonthKey{2004, 12}};
  const auto rep = backtest(fx.pyramid, fx.prices, ProxySpec{}, fr, er);
  EXPECT_FALSE(rep.overlapping);
  EXPECT_EQ(rep.n_eval, 120u);
  EXPECT_NEAR(rep.eval_std * rep.eval_std,
              (rep.eval_rms * rep.eval_rms - rep.eval_mean * rep.eval_mean) * 120.0 / 119.0, 1e-12);
  EXPECT_EQ(code_of([&] { backtest(fx.pyramid, fx.prices, ProxySpec{}, fr, fr); }),
            ErrorCode::InvalidArgument);

  BacktestOptions fixed;
  fixed.fixed = Coefficients{170, -0.04};
  const auto f = backtest(fx.pyramid, fx.prices, ProxySpec{}, fr, er, fixed);
  EXPECT_TRUE(f.fit.fixed);
  EXPECT_EQ(f.fit.a, 170.0);
}
