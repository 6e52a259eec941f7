#include "demotrend/population.hpp"

#include <cmath>
#include <string>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

namespace demotrend {

std::string_view to_string(Vintage vintage) noexcept {
  switch (vintage) {
    case Vintage::Postcensal: return "postcensal";
    case Vintage::Intercensal: return "intercensal";
    case Vintage::Synthetic: return "synthetic";
  }
  return "unknown";
}

Vintage parse_vintage(std::string_view text) {
  if (text == "postcensal") return Vintage::Postcensal;
  if (text == "intercensal") return Vintage::Intercensal;
  if (text == "synthetic") return Vintage::Synthetic;
  throw Error(ErrorCode::Parse, "unknown vintage '" + std::string(text) +
                                    "' (expected postcensal|intercensal|synthetic)");
}

AgePyramid::AgePyramid(MonthKey first_month, std::size_t n_months, int min_age, int max_age,
                       std::vector<double> counts, Vintage vintage)
    : first_(first_month),
      n_months_(n_months),
      min_age_(min_age),
      max_age_(max_age),
      counts_(std::move(counts)),
      vintage_(vintage) {
  if (n_months_ == 0 || max_age_ < min_age_ || min_age_ < 0) {
    throw Error(ErrorCode::InvalidArgument, "age pyramid needs >= 1 month and a valid age range");
  }
  if (counts_.size() != n_months_ * n_ages()) {
    throw Error(ErrorCode::InvalidArgument,
                "age pyramid is not rectangular: expected " + std::to_string(n_months_ * n_ages()) +
                    " counts, got " + std::to_string(counts_.size()));
  }
  for (std::size_t m = 0; m < n_months_; ++m) {
    for (std::size_t a = 0; a < n_ages(); ++a) {
      const double c = counts_[m * n_ages() + a];
      if (!std::isfinite(c) || c <= 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "count must be positive and finite at " +
                        first_.plus(static_cast<long>(m)).to_string() + ", age " +
                        std::to_string(min_age_ + static_cast<int>(a)));
      }
    }
  }
}

double AgePyramid::count(std::size_t month_index, int age) const {
  if (month_index >= n_months_ || !has_age(age)) {
    throw Error(ErrorCode::OutOfRange, "pyramid cell (" + std::to_string(month_index) + ", " +
                                           std::to_string(age) + ") out of range");
  }
  return counts_[month_index * n_ages() + static_cast<std::size_t>(age - min_age_)];
}

void ProxySpec::validate(const AgePyramid& p) const {
  if (half_width < 0) {
    throw Error(ErrorCode::InvalidArgument, "proxy half_width must be >= 0");
  }
  if (month_window < 1) {
    throw Error(ErrorCode::InvalidArgument, "proxy month_window must be >= 1");
  }
  if (center_age - half_width < p.min_age() || center_age + half_width > p.max_age()) {
    throw Error(ErrorCode::OutOfRange,
                "proxy ages " + std::to_string(center_age - half_width) + ".." +
                    std::to_string(center_age + half_width) + " outside pyramid ages " +
                    std::to_string(p.min_age()) + ".." + std::to_string(p.max_age()));
  }
}

MonthlySeries extract_age(const AgePyramid& p, int age) {
  if (!p.has_age(age)) {
    throw Error(ErrorCode::OutOfRange, "age " + std::to_string(age) + " outside pyramid ages " +
                                           std::to_string(p.min_age()) + ".." +
                                           std::to_string(p.max_age()));
  }
  std::vector<double> out(p.n_months());
  for (std::size_t m = 0; m < p.n_months(); ++m) out[m] = p.count(m, age);
  return MonthlySeries(p.first_month(), std::move(out), Unit::Persons);
}

MonthlySeries smoothed_n9(const AgePyramid& p, const ProxySpec& spec) {
  spec.validate(p);
  if (p.n_months() < static_cast<std::size_t>(spec.month_window) + 1) {
    throw Error(ErrorCode::InvalidArgument,
                "smoothed proxy would be shorter than 2 months (pyramid has " +
                    std::to_string(p.n_months()) + " months, window " +
                    std::to_string(spec.month_window) + ")");
  }
  std::vector<double> means(p.n_months());
  const double width = 2.0 * spec.half_width + 1.0;
  for (std::size_t m = 0; m < p.n_months(); ++m) {
    double sum = 0.0;
    for (int age = spec.center_age - spec.half_width; age <= spec.center_age + spec.half_width; ++age) {
      sum += p.count(m, age);
    }
    means[m] = spec.half_width == 0 ? sum : sum / width;
  }
  MonthlySeries averaged(p.first_month(), std::move(means), Unit::Persons);
  if (spec.month_window > 1) averaged = moving_average(averaged, spec.month_window);
  return averaged.shifted(spec.time_shift);
}

MonthlySeries n9_change_rate(const AgePyramid& p, const ProxySpec& spec) {
  return dln(smoothed_n9(p, spec));
}

AgePyramid intercensalize(const AgePyramid& postcensal, std::span<const double> census_start,
                          std::span<const double> census_end) {
  const std::size_t n_ages = postcensal.n_ages();
  if (census_start.size() != n_ages || census_end.size() != n_ages) {
    throw Error(ErrorCode::InvalidArgument,
                "census counts misaligned with pyramid ages: expected " + std::to_string(n_ages) +
                    " ages, got " + std::to_string(census_start.size()) + " and " +
                    std::to_string(census_end.size()));
  }
  for (std::size_t a = 0; a < n_ages; ++a) {
    if (!(census_start[a] > 0.0) || !(census_end[a] > 0.0) || !std::isfinite(census_start[a]) ||
        !std::isfinite(census_end[a])) {
      throw Error(ErrorCode::InvalidArgument,
                  "census counts must be positive at age " +
                      std::to_string(postcensal.min_age() + static_cast<int>(a)));
    }
  }

  const std::size_t months = postcensal.n_months();
  const double k_total = static_cast<double>(months);
  std::vector<double> adjusted(postcensal.counts().begin(), postcensal.counts().end());
  for (std::size_t a = 0; a < n_ages; ++a) {
    const int age = postcensal.min_age() + static_cast<int>(a);
    const double closure = census_end[a] / postcensal.count(months - 1, age);
    const double log_closure = std::log(closure);
    for (std::size_t m = 0; m + 1 < months; ++m) {
      const double k = static_cast<double>(m + 1);
      adjusted[m * n_ages + a] *= std::exp(log_closure * k / k_total);
    }
    // The final month is pinned to the census count itself.
    adjusted[(months - 1) * n_ages + a] = census_end[a];
  }
  return AgePyramid(postcensal.first_month(), months, postcensal.min_age(), postcensal.max_age(),
                    std::move(adjusted), Vintage::Intercensal);
}

AgePyramid synthesize_pyramid(const PyramidSynthesis& spec) {
  if (spec.n_months == 0 || spec.max_age < spec.min_age) {
    throw Error(ErrorCode::InvalidArgument, "synthesis needs >= 1 month and a valid age range");
  }
  const auto n_ages = static_cast<std::size_t>(spec.max_age - spec.min_age + 1);
  if (spec.base_counts.size() != n_ages || spec.monthly_growth_by_age.size() != n_ages) {
    throw Error(ErrorCode::InvalidArgument,
                "synthesis needs one base count and one growth rate per age");
  }
  if (!spec.common_growth.empty() && spec.common_growth.size() != spec.n_months) {
    throw Error(ErrorCode::InvalidArgument, "common growth path must have one entry per month");
  }
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) {
    throw Error(ErrorCode::InvalidArgument, "noise_sd must be >= 0");
  }
  for (double b : spec.base_counts) {
    if (!(b > 0.0) || !std::isfinite(b)) {
      throw Error(ErrorCode::InvalidArgument, "base counts must be positive");
    }
  }

  boost::random::mt19937_64 engine(spec.seed);
  boost::random::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> counts(spec.n_months * n_ages);
  double common = 0.0;
  for (std::size_t m = 0; m < spec.n_months; ++m) {
    if (m > 0 && !spec.common_growth.empty()) common += spec.common_growth[m];
    for (std::size_t a = 0; a < n_ages; ++a) {
      double log_factor = spec.monthly_growth_by_age[a] * static_cast<double>(m) + common;
      if (spec.noise_sd > 0.0) log_factor += spec.noise_sd * normal(engine);
      const double c = spec.base_counts[a] * std::exp(log_factor);
      if (!std::isfinite(c) || c <= 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "synthesis produced a non-positive count at month " + std::to_string(m));
      }
      counts[m * n_ages + a] = c;
    }
  }
  return AgePyramid(spec.first_month, spec.n_months, spec.min_age, spec.max_age,
                    std::move(counts), Vintage::Synthetic);
}

}  // namespace demotrend
