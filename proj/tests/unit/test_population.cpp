#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "demotrend/population.hpp"
#include "dgp.hpp"

using namespace demotrend;

namespace {

const MonthKey kStart{1990, 1};

std::vector<double> vec(const MonthlySeries& s) { return {s.values().begin(), s.values().end()}; }

PyramidSynthesis synthesis(std::uint64_t seed, std::size_t months, double growth, double noise) {
  PyramidSynthesis ps;
  ps.seed = seed;
  ps.first_month = kStart;
  ps.n_months = months;
  ps.min_age = 0;
  ps.max_age = 20;
  for (int a = 0; a <= 20; ++a) ps.base_counts.push_back(3.0e6 + 25000.0 * a);
  ps.monthly_growth_by_age.assign(21, growth);
  ps.noise_sd = noise;
  return ps;
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

TEST(AgePyramid, Validation) {
  EXPECT_EQ(code_of([] { AgePyramid(kStart, 2, 0, 1, {1, 2, 3}, Vintage::Synthetic); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { AgePyramid(kStart, 1, 0, 1, {1, 0}, Vintage::Synthetic); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { AgePyramid(kStart, 1, 3, 2, {}, Vintage::Synthetic); }),
            ErrorCode::InvalidArgument);
  const AgePyramid p(kStart, 2, 4, 5, {1, 2, 3, 4}, Vintage::Postcensal);
  EXPECT_EQ(p.count(1, 4), 3.0);
  EXPECT_EQ(p.last_month(), kStart.next());
  EXPECT_EQ(code_of([&] { p.count(2, 4); }), ErrorCode::OutOfRange);
  EXPECT_EQ(parse_vintage("intercensal"), Vintage::Intercensal);
  EXPECT_EQ(code_of([] { parse_vintage("census"); }), ErrorCode::Parse);
}

TEST(ExtractAge, SingleAgeAndRow) {
  const AgePyramid single(kStart, 3, 9, 9, {5, 6, 7}, Vintage::Synthetic);
  EXPECT_EQ(vec(extract_age(single, 9)), (std::vector<double>{5, 6, 7}));
  EXPECT_EQ(extract_age(single, 9).unit(), Unit::Persons);

  const auto p = synthesize_pyramid(synthesis(3, 12, 0.001, 0.02));
  const auto s = extract_age(p, 9);
  for (std::size_t m = 0; m < p.n_months(); ++m) EXPECT_EQ(s[m], p.count(m, 9));
  EXPECT_EQ(code_of([&] { extract_age(p, 21); }), ErrorCode::OutOfRange);
}

TEST(SmoothedN9, ConstantPyramidAnySpec) {
  const AgePyramid p(kStart, 24, 0, 20, std::vector<double>(24 * 21, 777.0), Vintage::Synthetic);
  for (const ProxySpec& spec : {ProxySpec{9, 2, 0, 1}, ProxySpec{7, 2, 24, 1},
                                ProxySpec{17, 0, -96, 4}, ProxySpec{3, 2, 72, 12}}) {
    for (double v : vec(smoothed_n9(p, spec))) EXPECT_EQ(v, 777.0);
  }
}

TEST(SmoothedN9, IdentitySpecEqualsExtractAge) {
  const auto p = synthesize_pyramid(synthesis(4, 30, 0.0005, 0.03));
  for (int age : {0, 9, 20}) EXPECT_EQ(smoothed_n9(p, ProxySpec{age, 0, 0, 1}), extract_age(p, age));
}

TEST(SmoothedN9, FiveAgeMeanOracle) {
  const auto p = synthesize_pyramid(synthesis(5, 36, 0.0, 0.05));
  const auto s = smoothed_n9(p, ProxySpec{});
  ASSERT_EQ(s.size(), 36u);
  for (std::size_t m = 0; m < 36; ++m) {
    double sum = 0.0;
    for (int a = 7; a <= 11; ++a) sum += p.count(m, a);
    EXPECT_NEAR(s[m], sum / 5.0, 1e-12 * s[m]);
  }
}

TEST(SmoothedN9, WindowAndShift) {
  const auto p = synthesize_pyramid(synthesis(6, 40, 0.001, 0.02));
  const auto base = smoothed_n9(p, ProxySpec{17, 0, 0, 4});
  EXPECT_EQ(base.start(), kStart.plus(3));
  for (std::size_t i = 0; i < base.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = i; j < i + 4; ++j) s += p.count(j, 17);
    EXPECT_NEAR(base[i], s / 4.0, 1e-9);
  }
  for (long shift : {-96L, -5L, 24L}) {
    const auto shifted = smoothed_n9(p, ProxySpec{17, 0, shift, 4});
    EXPECT_EQ(shifted.start(), base.start().plus(shift));
    for (std::size_t i = 0; i < base.size(); ++i) {
      // value at month m equals the unshifted one at m - shift
      EXPECT_EQ(shifted.at(base.month_at(i).plus(shift)), base[i]);
    }
  }
}

TEST(SmoothedN9, Errors) {
  const auto p = synthesize_pyramid(synthesis(7, 5, 0.0, 0.0));
  EXPECT_EQ(code_of([&] { smoothed_n9(p, ProxySpec{19, 2, 0, 1}); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([&] { smoothed_n9(p, ProxySpec{1, 2, 0, 1}); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code_of([&] { smoothed_n9(p, ProxySpec{9, 2, 0, 0}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { smoothed_n9(p, ProxySpec{9, -1, 0, 1}); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { smoothed_n9(p, ProxySpec{9, 2, 0, 5}); }), ErrorCode::InvalidArgument);
}

TEST(ChangeRate, ConstantPyramidGivesZeros) {
  const AgePyramid p(kStart, 10, 0, 20, std::vector<double>(210, 12.0), Vintage::Synthetic);
  for (double v : vec(n9_change_rate(p, ProxySpec{}))) EXPECT_EQ(v, 0.0);
}

TEST(ChangeRate, UniformGrowthGivesG) {
  for (double g : {0.0, 0.0025, -0.004}) {
    const auto p = synthesize_pyramid(synthesis(8, 48, g, 0.0));
    for (const ProxySpec& spec : {ProxySpec{}, ProxySpec{3, 2, 72, 1}, ProxySpec{17, 0, -96, 4}}) {
      const auto r = n9_change_rate(p, spec);
      EXPECT_EQ(r.unit(), Unit::LogDifference);
      for (double v : vec(r)) EXPECT_NEAR(v, g, 1e-12);
    }
  }
}

TEST(ChangeRate, EqualsDlnOfSmoothedAndIsScaleInvariant) {
  auto ps = synthesis(9, 30, 0.001, 0.01);
  const auto p = synthesize_pyramid(ps);
  const auto r = n9_change_rate(p, ProxySpec{});
  const auto s = smoothed_n9(p, ProxySpec{});
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_NEAR(r[i - 1], std::log(s[i] / s[i - 1]), 1e-12);

  std::vector<double> scaled(p.counts().begin(), p.counts().end());
  for (double& c : scaled) c *= 3.25;
  const AgePyramid q(p.first_month(), p.n_months(), p.min_age(), p.max_age(), scaled,
                     Vintage::Synthetic);
  const auto rq = n9_change_rate(q, ProxySpec{});
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(rq[i], r[i], 1e-12);
}

TEST(Intercensalize, UnitClosureIsIdentity) {
  const auto p = synthesize_pyramid(synthesis(10, 24, 0.001, 0.01));
  std::vector<double> start, end;
  for (int a = 0; a <= 20; ++a) {
    start.push_back(p.count(0, a));
    end.push_back(p.count(23, a));
  }
  const auto q = intercensalize(p, start, end);
  EXPECT_TRUE(std::equal(q.counts().begin(), q.counts().end(), p.counts().begin()));
  EXPECT_EQ(q.vintage(), Vintage::Intercensal);
}

TEST(Intercensalize, ThreePointFivePercentClosure) {
  const std::size_t K = 120;
  const AgePyramid p(kStart, K, 5, 13, std::vector<double>(K * 9, 100.0), Vintage::Postcensal);
  const std::vector<double> start(9, 100.0), end(9, 103.5);
  const auto q = intercensalize(p, start, end);
  for (int a = 5; a <= 13; ++a) {
    EXPECT_EQ(q.count(K - 1, a), 103.5);
    for (std::size_t m = 0; m + 1 < K; ++m) {
      const double k = static_cast<double>(m + 1);
      EXPECT_NEAR(q.count(m, a), 100.0 * std::pow(1.035, k / K), 1e-9);
      // geometric: the month-on-month correction is a constant factor
      EXPECT_NEAR(q.count(m + 1, a) / q.count(m, a), std::pow(1.035, 1.0 / K), 1e-12);
      EXPECT_GT(q.count(m + 1, a), q.count(m, a));
    }
  }
}

TEST(Intercensalize, TwoMonthToy) {
  const AgePyramid p(kStart, 2, 0, 0, {1.0, 1.0}, Vintage::Postcensal);
  const std::vector<double> start{1.0}, end{1.21};
  const auto q = intercensalize(p, start, end);
  EXPECT_NEAR(q.count(0, 0), 1.1, 1e-15);
  EXPECT_EQ(q.count(1, 0), 1.21);
}

TEST(Intercensalize, EndpointsMatchCensusOnSeededPyramids) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = synthesize_pyramid(synthesis(seed, 60, 0.0008, 0.02));
    auto rng = dgp::rng_for(seed, 200);
    std::vector<double> start, end;
    for (int a = 0; a <= 20; ++a) {
      start.push_back(p.count(0, a));
      end.push_back(p.count(59, a) * (1.0 + 0.03 * dgp::draw(rng)));
    }
    const auto q = intercensalize(p, start, end);
    for (int a = 0; a <= 20; ++a) {
      EXPECT_NEAR(q.count(59, a) / end[static_cast<std::size_t>(a)], 1.0, 1e-9);
    }
  }
}

TEST(Intercensalize, Errors) {
  const AgePyramid p(kStart, 2, 0, 1, {1, 1, 1, 1}, Vintage::Postcensal);
  const std::vector<double> one{1.0}, two{1.0, 1.0}, bad{1.0, 0.0};
  EXPECT_EQ(code_of([&] { intercensalize(p, one, two); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { intercensalize(p, two, bad); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([&] { intercensalize(p, bad, two); }), ErrorCode::InvalidArgument);
}

TEST(Synthesize, NoNoiseNoGrowthIsConstant) {
  auto ps = synthesis(11, 15, 0.0, 0.0);
  const auto p = synthesize_pyramid(ps);
  for (std::size_t m = 0; m < 15; ++m) {
    for (int a = 0; a <= 20; ++a) EXPECT_EQ(p.count(m, a), ps.base_counts[static_cast<std::size_t>(a)]);
  }
}

TEST(Synthesize, DeterministicUnderSeed) {
  const auto ps = synthesis(12, 20, 0.001, 0.05);
  EXPECT_EQ(synthesize_pyramid(ps), synthesize_pyramid(ps));
  auto other = ps;
  other.seed = 13;
  EXPECT_FALSE(synthesize_pyramid(ps) == synthesize_pyramid(other));
}

TEST(Synthesize, ClosedFormCounts) {
  const auto ps = synthesis(14, 12, 0.003, 0.0);
  const auto p = synthesize_pyramid(ps);
  for (std::size_t m = 0; m < 12; ++m) {
    for (int a = 0; a <= 20; ++a) {
      const double expect = ps.base_counts[static_cast<std::size_t>(a)] * std::exp(0.003 * m);
      EXPECT_NEAR(p.count(m, a) / expect, 1.0, 1e-14);
    }
  }
}

TEST(Synthesize, NoiseHasRequestedScale) {
  const auto p = synthesize_pyramid(synthesis(15, 400, 0.0, 0.02));
  double ss = 0.0;
  std::size_t n = 0;
  for (std::size_t m = 0; m < 400; ++m) {
    for (int a = 0; a <= 20; ++a) {
      const double e = std::log(p.count(m, a) / (3.0e6 + 25000.0 * a));
      ss += e * e;
      ++n;
    }
  }
  EXPECT_NEAR(std::sqrt(ss / static_cast<double>(n)), 0.02, 0.0005);
}

TEST(Synthesize, Errors) {
  auto ps = synthesis(16, 5, 0.0, 0.0);
  ps.noise_sd = -1.0;
  EXPECT_EQ(code_of([&] { synthesize_pyramid(ps); }), ErrorCode::InvalidArgument);
  ps = synthesis(16, 5, 0.0, 0.0);
  ps.base_counts[3] = 0.0;
  EXPECT_EQ(code_of([&] { synthesize_pyramid(ps); }), ErrorCode::InvalidArgument);
  ps = synthesis(16, 5, 0.0, 0.0);
  ps.monthly_growth_by_age.pop_back();
  EXPECT_EQ(code_of([&] { synthesize_pyramid(ps); }), ErrorCode::InvalidArgument);
  ps = synthesis(16, 5, 800.0, 0.0);  // overflows to +inf
  EXPECT_EQ(code_of([&] { synthesize_pyramid(ps); }), ErrorCode::InvalidArgument);
}
