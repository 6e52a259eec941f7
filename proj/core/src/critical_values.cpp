#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "demotrend/econometrics.hpp"

namespace demotrend::econ {

namespace {

// Fuller (1976) percentiles of the Dickey-Fuller t statistic, columns
// 1%, 5%, 10%; rows by sample size, last row asymptotic.
constexpr std::array<double, 5> kFullerSizes{25, 50, 100, 250, 500};

struct FullerRow {
  double p1, p5, p10;
};

constexpr std::array<FullerRow, 6> kFullerNone{{
    {-2.66, -1.95, -1.60},
    {-2.62, -1.95, -1.61},
    {-2.60, -1.95, -1.61},
    {-2.58, -1.95, -1.62},
    {-2.58, -1.95, -1.62},
    {-2.58, -1.95, -1.62},
}};

constexpr std::array<FullerRow, 6> kFullerConstant{{
    {-3.75, -3.00, -2.63},
    {-3.58, -2.93, -2.60},
    {-3.51, -2.89, -2.58},
    {-3.46, -2.88, -2.57},
    {-3.44, -2.87, -2.57},
    {-3.43, -2.86, -2.57},
}};

constexpr std::array<FullerRow, 6> kFullerTrend{{
    {-4.38, -3.60, -3.24},
    {-4.15, -3.50, -3.18},
    {-4.04, -3.45, -3.15},
    {-3.99, -3.43, -3.13},
    {-3.98, -3.42, -3.13},
    {-3.96, -3.41, -3.12},
}};

FullerRow lerp(const FullerRow& a, const FullerRow& b, double w) {
  return {a.p1 + w * (b.p1 - a.p1), a.p5 + w * (b.p5 - a.p5), a.p10 + w * (b.p10 - a.p10)};
}

FullerRow fuller_lookup(const std::array<FullerRow, 6>& table, double n) {
  if (n <= kFullerSizes.front()) return table.front();
  for (std::size_t i = 0; i + 1 < kFullerSizes.size(); ++i) {
    if (n <= kFullerSizes[i + 1]) {
      const double w = (n - kFullerSizes[i]) / (kFullerSizes[i + 1] - kFullerSizes[i]);
      return lerp(table[i], table[i + 1], w);
    }
  }
  // Past the last finite row: linear in 1/n towards the asymptotic row.
  const double w = 1.0 - kFullerSizes.back() / n;
  return lerp(table[4], table[5], w);
}

// MacKinnon (2010) response surfaces: cv = b0 + b1/T + b2/T^2 + b3/T^3.
struct Surface {
  double b0, b1, b2, b3;
  double at(double n) const { return b0 + b1 / n + b2 / (n * n) + b3 / (n * n * n); }
};

constexpr std::array<Surface, 3> kMacKinnonNoConstant{{
    {-2.56574, -2.2358, -3.627, 0.0},
    {-1.94100, -0.2686, -3.365, 31.223},
    {-1.61682, 0.2656, -2.714, 25.364},
}};

// Two variables, constant in the cointegrating regression.
constexpr std::array<Surface, 3> kMacKinnonCointTwo{{
    {-3.89644, -10.9519, -22.527, 0.0},
    {-3.33613, -6.1101, -6.823, 0.0},
    {-3.04445, -4.2412, -2.720, 0.0},
}};

// Elliott-Rothenberg-Stock (1996) DF-GLS with linear trend, by T.
constexpr std::array<double, 3> kErsSizes{50, 100, 200};
constexpr std::array<FullerRow, 4> kErsTrend{{
    {-3.77, -3.19, -2.89},
    {-3.58, -3.03, -2.74},
    {-3.46, -2.93, -2.64},
    {-3.48, -2.89, -2.57},
}};

FullerRow ers_lookup(double n) {
  if (n <= kErsSizes.front()) return kErsTrend.front();
  // Interpolate linearly in 1/T; the asymptotic row sits at 1/T = 0.
  for (std::size_t i = 0; i + 1 < kErsSizes.size(); ++i) {
    if (n <= kErsSizes[i + 1]) {
      const double w = (1.0 / kErsSizes[i] - 1.0 / n) / (1.0 / kErsSizes[i] - 1.0 / kErsSizes[i + 1]);
      return lerp(kErsTrend[i], kErsTrend[i + 1], w);
    }
  }
  const double w = 1.0 - kErsSizes.back() / n;
  return lerp(kErsTrend[2], kErsTrend[3], w);
}

CriticalValues from_row(const FullerRow& row, std::string source) {
  return {row.p1, row.p5, row.p10, std::move(source)};
}

CriticalValues from_surface(const std::array<Surface, 3>& s, double n, std::string source) {
  return {s[0].at(n), s[1].at(n), s[2].at(n), std::move(source)};
}

}  // namespace

CriticalValues adf_critical(Trend trend, std::size_t n_obs) {
  const auto n = static_cast<double>(n_obs);
  switch (trend) {
    case Trend::None: return from_row(fuller_lookup(kFullerNone, n), "fuller-1976");
    case Trend::Constant: return from_row(fuller_lookup(kFullerConstant, n), "fuller-1976");
    case Trend::Trend: return from_row(fuller_lookup(kFullerTrend, n), "fuller-1976");
  }
  return {};
}

CriticalValues dfgls_critical(Trend trend, std::size_t n_obs) {
  const auto n = static_cast<double>(n_obs);
  if (trend == Trend::Trend) return from_row(ers_lookup(n), "ers-1996");
  return from_surface(kMacKinnonNoConstant, n, "mackinnon-2010-nc");
}

CriticalValues engle_granger_critical(std::size_t n_obs) {
  return from_surface(kMacKinnonCointTwo, static_cast<double>(n_obs), "mackinnon-2010-coint2");
}

TraceCritical johansen_trace_critical(JohansenTrend trend, int n_minus_r) {
  // Osterwald-Lenum (1992) 95% quantiles of the trace statistic.
  static constexpr std::array<double, 5> kNone{3.84, 12.53, 24.31, 39.89, 59.46};
  static constexpr std::array<double, 5> kRConstant{9.24, 19.96, 34.91, 53.12, 76.07};
  static constexpr std::array<double, 5> kConstant{3.76, 15.41, 29.68, 47.21, 68.52};
  if (n_minus_r < 1 || n_minus_r > 5) {
    throw Error(ErrorCode::OutOfRange,
                "johansen critical values tabulated for 1..5 common trends, got " +
                    std::to_string(n_minus_r));
  }
  const auto i = static_cast<std::size_t>(n_minus_r - 1);
  switch (trend) {
    case JohansenTrend::None: return {kNone[i], "osterwald-lenum-1992"};
    case JohansenTrend::RConstant:
      if (n_minus_r == 1) return {9.25, "published"};
      return {kRConstant[i], "osterwald-lenum-1992"};
    case JohansenTrend::Constant: return {kConstant[i], "osterwald-lenum-1992"};
  }
  return {};
}

}  // namespace demotrend::econ
