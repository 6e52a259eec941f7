#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "demotrend/error.hpp"

namespace demotrend {

/// A calendar month. Ordered lexicographically by (year, month).
class MonthKey {
 public:
  constexpr MonthKey() = default;
  MonthKey(int year, int month);

  int year() const noexcept { return year_; }
  int month() const noexcept { return month_; }

  /// Shift by a signed number of months, wrapping across years.
  MonthKey plus(long months) const;
  MonthKey next() const { return plus(1); }
  MonthKey prev() const { return plus(-1); }

  /// Signed number of months from `other` to this month.
  long months_since(const MonthKey& other) const noexcept;

  /// "YYYY-MM".
  std::string to_string() const;
  static MonthKey parse(std::string_view text);

  friend constexpr auto operator<=>(const MonthKey&, const MonthKey&) = default;

 private:
  int year_ = 2000;
  int month_ = 1;
};

/// Inclusive month interval.
struct MonthRange {
  MonthKey from;
  MonthKey to;

  bool contains(const MonthKey& m) const noexcept { return from <= m && m <= to; }
  bool overlaps(const MonthRange& other) const noexcept {
    return !(other.to < from || to < other.from);
  }
  long length() const noexcept { return to.months_since(from) + 1; }
};

enum class Unit { IndexPoints, Persons, Return, LogDifference };

std::string_view to_string(Unit unit) noexcept;

/// Gap-free monthly series: value k belongs to start + k months.
///
/// Construction validates the invariants (non-empty, finite, persons > 0),
/// so every instance in circulation is well formed.
class MonthlySeries {
 public:
  MonthlySeries(MonthKey start, std::vector<double> values, Unit unit);

  MonthKey start() const noexcept { return start_; }
  MonthKey last() const { return start_.plus(static_cast<long>(values_.size()) - 1); }
  MonthRange range() const { return {start_, last()}; }
  Unit unit() const noexcept { return unit_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  MonthKey month_at(std::size_t i) const { return start_.plus(static_cast<long>(i)); }
  bool covers(const MonthKey& m) const { return range().contains(m); }
  double at(const MonthKey& m) const;

  /// Sub-series over [from, to]; both ends must lie inside the series.
  MonthlySeries slice(const MonthKey& from, const MonthKey& to) const;
  /// Same values relocated by `months` on the calendar.
  MonthlySeries shifted(long months) const;
  MonthlySeries with_unit(Unit unit) const;

  friend bool operator==(const MonthlySeries&, const MonthlySeries&) = default;

 private:
  MonthKey start_;
  std::vector<double> values_;
  Unit unit_;
};

struct QuarterKey {
  int year = 2000;
  int quarter = 1;

  QuarterKey plus(long quarters) const;
  MonthKey first_month() const { return MonthKey(year, 3 * (quarter - 1) + 1); }
  std::string to_string() const;  // "YYYY-Qn"
  static QuarterKey parse(std::string_view text);

  friend constexpr auto operator<=>(const QuarterKey&, const QuarterKey&) = default;
};

enum class QuarterlyUnit { GrowthRate, Level };

std::string_view to_string(QuarterlyUnit unit) noexcept;

class QuarterlySeries {
 public:
  QuarterlySeries(QuarterKey start, std::vector<double> values, QuarterlyUnit unit);

  QuarterKey start() const noexcept { return start_; }
  QuarterKey last() const { return start_.plus(static_cast<long>(values_.size()) - 1); }
  QuarterlyUnit unit() const noexcept { return unit_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const QuarterlySeries&, const QuarterlySeries&) = default;

 private:
  QuarterKey start_;
  std::vector<double> values_;
  QuarterlyUnit unit_;
};

/// r_t = P_t / P_{t-1} - 1 (arithmetic). Starts one month after `prices`.
MonthlySeries monthly_return(const MonthlySeries& prices);

/// Trailing sum of twelve monthly returns. Starts 11 months after input.
MonthlySeries cumulative_return_12m(const MonthlySeries& monthly);

/// P_t / P_{t-12} - 1. Starts 12 months after input.
MonthlySeries annual_ratio_return(const MonthlySeries& prices);

/// ln(x_t) - ln(x_{t-1}).
MonthlySeries dln(const MonthlySeries& series);

/// Trailing mean over `window` months. Starts window-1 months after input.
MonthlySeries moving_average(const MonthlySeries& series, int window);

/// Trim both series to their common month range.
std::pair<MonthlySeries, MonthlySeries> align(const MonthlySeries& a, const MonthlySeries& b);

enum class BridgeMethod { Step, LinearInLog };

/// Monthly path covering every month of every quarter in `q`.
///
/// Step repeats each quarterly value three times. LinearInLog places each
/// quarter's level at its middle month and interpolates ln(level) linearly,
/// extending the end segments to the outer months.
MonthlySeries quarterly_to_monthly(const QuarterlySeries& q, BridgeMethod method, Unit unit);

}  // namespace demotrend
