#include "demotrend/series.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace demotrend {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::Degenerate: return "degenerate";
    case ErrorCode::RankDeficient: return "rank-deficient";
    case ErrorCode::Singular: return "singular";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

namespace {

bool parse_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

MonthKey::MonthKey(int year, int month) : year_(year), month_(month) {
  if (month < 1 || month > 12) {
    throw Error(ErrorCode::InvalidArgument, "month must be in 1..12, got " + std::to_string(month));
  }
}

MonthKey MonthKey::plus(long months) const {
  long index = static_cast<long>(year_) * 12 + (month_ - 1) + months;
  long year = index >= 0 ? index / 12 : -((-index + 11) / 12);
  long month0 = index - year * 12;
  return MonthKey(static_cast<int>(year), static_cast<int>(month0) + 1);
}

long MonthKey::months_since(const MonthKey& other) const noexcept {
  return (static_cast<long>(year_) - other.year_) * 12 + (month_ - other.month_);
}

std::string MonthKey::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year_, month_);
  return buf;
}

MonthKey MonthKey::parse(std::string_view text) {
  int year = 0;
  int month = 0;
  if (text.size() != 7 || text[4] != '-' || !parse_int(text.substr(0, 4), year) ||
      !parse_int(text.substr(5, 2), month) || month < 1 || month > 12) {
    throw Error(ErrorCode::Parse, "expected month as YYYY-MM, got '" + std::string(text) + "'");
  }
  return MonthKey(year, month);
}

std::string_view to_string(Unit unit) noexcept {
  switch (unit) {
    case Unit::IndexPoints: return "index-points";
    case Unit::Persons: return "persons";
    case Unit::Return: return "dimensionless-return";
    case Unit::LogDifference: return "log-difference";
  }
  return "unknown";
}

MonthlySeries::MonthlySeries(MonthKey start, std::vector<double> values, Unit unit)
    : start_(start), values_(std::move(values)), unit_(unit) {
  if (values_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "monthly series must hold at least one value");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::InvalidArgument,
                  "non-finite value at " + month_at(i).to_string());
    }
    if (unit_ == Unit::Persons && values_[i] <= 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "non-positive person count at " + month_at(i).to_string());
    }
  }
}

double MonthlySeries::at(const MonthKey& m) const {
  if (!covers(m)) {
    throw Error(ErrorCode::OutOfRange, "month " + m.to_string() + " outside series range " +
                                           start_.to_string() + ".." + last().to_string());
  }
  return values_[static_cast<std::size_t>(m.months_since(start_))];
}

MonthlySeries MonthlySeries::slice(const MonthKey& from, const MonthKey& to) const {
  if (to < from || !covers(from) || !covers(to)) {
    throw Error(ErrorCode::OutOfRange, "slice " + from.to_string() + ".." + to.to_string() +
                                           " outside series range " + start_.to_string() + ".." +
                                           last().to_string());
  }
  auto first = values_.begin() + from.months_since(start_);
  auto end = values_.begin() + to.months_since(start_) + 1;
  return MonthlySeries(from, std::vector<double>(first, end), unit_);
}

MonthlySeries MonthlySeries::shifted(long months) const {
  return MonthlySeries(start_.plus(months), values_, unit_);
}

MonthlySeries MonthlySeries::with_unit(Unit unit) const {
  return MonthlySeries(start_, values_, unit);
}

QuarterKey QuarterKey::plus(long quarters) const {
  long index = static_cast<long>(year) * 4 + (quarter - 1) + quarters;
  long y = index >= 0 ? index / 4 : -((-index + 3) / 4);
  return QuarterKey{static_cast<int>(y), static_cast<int>(index - y * 4) + 1};
}

std::string QuarterKey::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-Q%d", year, quarter);
  return buf;
}

QuarterKey QuarterKey::parse(std::string_view text) {
  int y = 0;
  int q = 0;
  if (text.size() != 7 || text[4] != '-' || text[5] != 'Q' || !parse_int(text.substr(0, 4), y) ||
      !parse_int(text.substr(6, 1), q) || q < 1 || q > 4) {
    throw Error(ErrorCode::Parse, "expected quarter as YYYY-Qn, got '" + std::string(text) + "'");
  }
  return QuarterKey{y, q};
}

std::string_view to_string(QuarterlyUnit unit) noexcept {
  return unit == QuarterlyUnit::GrowthRate ? "annualized-growth" : "level";
}

QuarterlySeries::QuarterlySeries(QuarterKey start, std::vector<double> values, QuarterlyUnit unit)
    : start_(start), values_(std::move(values)), unit_(unit) {
  if (start_.quarter < 1 || start_.quarter > 4) {
    throw Error(ErrorCode::InvalidArgument, "quarter must be in 1..4");
  }
  if (values_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "quarterly series must hold at least one value");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::InvalidArgument,
                  "non-finite value at " + start_.plus(static_cast<long>(i)).to_string());
    }
  }
}

namespace {

void require_unit(const MonthlySeries& s, Unit unit, std::string_view op) {
  if (s.unit() != unit) {
    throw Error(ErrorCode::InvalidArgument, std::string(op) + ": expected unit " +
                                                std::string(to_string(unit)) + ", got " +
                                                std::string(to_string(s.unit())));
  }
}

void require_length(const MonthlySeries& s, std::size_t n, std::string_view op) {
  if (s.size() < n) {
    throw Error(ErrorCode::InvalidArgument, std::string(op) + ": need at least " +
                                                std::to_string(n) + " months, got " +
                                                std::to_string(s.size()));
  }
}

void require_positive(const MonthlySeries& s, std::string_view op) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, std::string(op) + ": non-positive value at " +
                                                  s.month_at(i).to_string());
    }
  }
}

}  // namespace

MonthlySeries monthly_return(const MonthlySeries& prices) {
  require_unit(prices, Unit::IndexPoints, "monthly_return");
  require_length(prices, 2, "monthly_return");
  require_positive(prices, "monthly_return");
  std::vector<double> out(prices.size() - 1);
  for (std::size_t i = 1; i < prices.size(); ++i) out[i - 1] = prices[i] / prices[i - 1] - 1.0;
  return MonthlySeries(prices.start().next(), std::move(out), Unit::Return);
}

MonthlySeries cumulative_return_12m(const MonthlySeries& monthly) {
  require_unit(monthly, Unit::Return, "cumulative_return_12m");
  require_length(monthly, 12, "cumulative_return_12m");
  // Each window is summed afresh so the result does not depend on
  // accumulated rounding from earlier windows.
  std::vector<double> out(monthly.size() - 11);
  for (std::size_t t = 11; t < monthly.size(); ++t) {
    double sum = 0.0;
    for (std::size_t i = t - 11; i <= t; ++i) sum += monthly[i];
    out[t - 11] = sum;
  }
  return MonthlySeries(monthly.start().plus(11), std::move(out), Unit::Return);
}

MonthlySeries annual_ratio_return(const MonthlySeries& prices) {
  require_unit(prices, Unit::IndexPoints, "annual_ratio_return");
  require_length(prices, 13, "annual_ratio_return");
  require_positive(prices, "annual_ratio_return");
  std::vector<double> out(prices.size() - 12);
  for (std::size_t t = 12; t < prices.size(); ++t) out[t - 12] = prices[t] / prices[t - 12] - 1.0;
  return MonthlySeries(prices.start().plus(12), std::move(out), Unit::Return);
}

MonthlySeries dln(const MonthlySeries& series) {
  require_length(series, 2, "dln");
  require_positive(series, "dln");
  std::vector<double> out(series.size() - 1);
  for (std::size_t i = 1; i < series.size(); ++i) {
    out[i - 1] = std::log(series[i]) - std::log(series[i - 1]);
  }
  return MonthlySeries(series.start().next(), std::move(out), Unit::LogDifference);
}

MonthlySeries moving_average(const MonthlySeries& series, int window) {
  if (window < 1) {
    throw Error(ErrorCode::InvalidArgument, "moving_average: window must be >= 1");
  }
  const auto w = static_cast<std::size_t>(window);
  require_length(series, w, "moving_average");
  std::vector<double> out(series.size() - w + 1);
  for (std::size_t t = w - 1; t < series.size(); ++t) {
    double sum = 0.0;
    for (std::size_t i = t + 1 - w; i <= t; ++i) sum += series[i];
    out[t + 1 - w] = sum / static_cast<double>(w);
  }
  return MonthlySeries(series.start().plus(window - 1), std::move(out), series.unit());
}

std::pair<MonthlySeries, MonthlySeries> align(const MonthlySeries& a, const MonthlySeries& b) {
  const MonthKey from = std::max(a.start(), b.start());
  const MonthKey to = std::min(a.last(), b.last());
  if (to < from) {
    throw Error(ErrorCode::OutOfRange, "align: ranges " + a.start().to_string() + ".." +
                                           a.last().to_string() + " and " +
                                           b.start().to_string() + ".." + b.last().to_string() +
                                           " do not overlap");
  }
  return {a.slice(from, to), b.slice(from, to)};
}

MonthlySeries quarterly_to_monthly(const QuarterlySeries& q, BridgeMethod method, Unit unit) {
  const std::size_t n = q.size();
  std::vector<double> out(3 * n);
  if (method == BridgeMethod::Step) {
    for (std::size_t i = 0; i < n; ++i) out[3 * i] = out[3 * i + 1] = out[3 * i + 2] = q[i];
    return MonthlySeries(q.start().first_month(), std::move(out), unit);
  }

  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(q[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument,
                  "quarterly_to_monthly: linear-in-log needs positive levels, got " +
                      std::to_string(q[i]) + " at " + q.start().plus(static_cast<long>(i)).to_string());
    }
    logs[i] = std::log(q[i]);
  }
  // Month m (0-based from the first quarter's first month) sits at
  // position (m - 1) / 3 on the quarter-midpoint axis.
  for (std::size_t m = 0; m < out.size(); ++m) {
    const double pos = (static_cast<double>(m) - 1.0) / 3.0;
    if (n == 1) {
      out[m] = q[0];
      continue;
    }
    std::size_t seg = pos <= 0.0 ? 0 : std::min(static_cast<std::size_t>(pos), n - 2);
    const double frac = pos - static_cast<double>(seg);
    out[m] = q[seg] * std::exp(frac * (logs[seg + 1] - logs[seg]));
  }
  return MonthlySeries(q.start().first_month(), std::move(out), unit);
}

}  // namespace demotrend
