#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "demotrend/series.hpp"

namespace demotrend {

enum class Vintage { Postcensal, Intercensal, Synthetic };

std::string_view to_string(Vintage vintage) noexcept;
Vintage parse_vintage(std::string_view text);

/// Persons by (month, single year of age) over a rectangular grid.
class AgePyramid {
 public:
  /// `counts` is month-major: counts[m * n_ages + (age - min_age)].
  AgePyramid(MonthKey first_month, std::size_t n_months, int min_age, int max_age,
             std::vector<double> counts, Vintage vintage);

  MonthKey first_month() const noexcept { return first_; }
  MonthKey last_month() const { return first_.plus(static_cast<long>(n_months_) - 1); }
  std::size_t n_months() const noexcept { return n_months_; }
  int min_age() const noexcept { return min_age_; }
  int max_age() const noexcept { return max_age_; }
  std::size_t n_ages() const noexcept { return static_cast<std::size_t>(max_age_ - min_age_ + 1); }
  Vintage vintage() const noexcept { return vintage_; }
  bool has_age(int age) const noexcept { return age >= min_age_ && age <= max_age_; }

  double count(std::size_t month_index, int age) const;
  std::span<const double> counts() const noexcept { return counts_; }

  friend bool operator==(const AgePyramid&, const AgePyramid&) = default;

 private:
  MonthKey first_;
  std::size_t n_months_;
  int min_age_;
  int max_age_;
  std::vector<double> counts_;
  Vintage vintage_;
};

/// Recipe for an N9 proxy: average ages center±half_width, smooth over a
/// trailing month window, then relocate by time_shift months.
struct ProxySpec {
  int center_age = 9;
  int half_width = 2;
  long time_shift = 0;
  int month_window = 1;

  void validate(const AgePyramid& p) const;

  friend bool operator==(const ProxySpec&, const ProxySpec&) = default;
};

MonthlySeries extract_age(const AgePyramid& p, int age);

MonthlySeries smoothed_n9(const AgePyramid& p, const ProxySpec& spec);

/// dln of smoothed_n9: the change rate that drives the return model.
MonthlySeries n9_change_rate(const AgePyramid& p, const ProxySpec& spec);

/// Reconcile a postcensal pyramid with two census counts.
///
/// The start census is the anchor the postcensal series was rolled forward
/// from and sits one month before the pyramid's first month (k = 0). For
/// each age the error of closure e = census_end / postcensal_last is spread
/// geometrically: month k of K gets multiplier e^(k/K), so the last month
/// matches census_end and the change rate moves by ln(e)/K every month.
AgePyramid intercensalize(const AgePyramid& postcensal, std::span<const double> census_start,
                          std::span<const double> census_end);

struct PyramidSynthesis {
  std::uint64_t seed = 0;
  MonthKey first_month;
  std::size_t n_months = 0;
  int min_age = 0;
  int max_age = 0;
  std::vector<double> base_counts;            // one per age
  std::vector<double> monthly_growth_by_age;  // one per age, log growth per month
  std::vector<double> common_growth;          // optional, one per month; entry 0 unused
  double noise_sd = 0.0;
};

/// counts(k, a) = base_a * exp(g_a * k + sum_{j<=k} c_j) * exp(eps), eps ~ N(0, sd^2).
/// Deterministic under the seed on every platform.
AgePyramid synthesize_pyramid(const PyramidSynthesis& spec);

}  // namespace demotrend
