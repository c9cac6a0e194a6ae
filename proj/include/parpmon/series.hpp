#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "parpmon/calendar.hpp"

namespace parpmon {

inline constexpr int kMonths = 12;
using MonthlyArray = std::array<double, kMonths>;

/// Contiguous, strictly positive monthly observations anchored at a calendar
/// month. Construction validates; instances are immutable afterwards.
class MonthlySeries {
 public:
  MonthlySeries(YearMonth start, std::vector<double> values, std::string label = {});

  YearMonth start() const { return start_; }
  YearMonth end() const { return start_ + static_cast<int>(values_.size()) - 1; }
  std::size_t size() const { return values_.size(); }
  const std::string& label() const { return label_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Calendar month (1..12) of element i.
  int month_of(std::size_t i) const { return (start_.month - 1 + static_cast<int>(i)) % kMonths + 1; }
  YearMonth stamp(std::size_t i) const { return start_ + static_cast<int>(i); }

  /// Index of a calendar stamp; throws kInvalidArgument when out of range.
  std::size_t index_of(YearMonth stamp) const;

  /// Elements [first, last] by calendar stamp, inclusive.
  MonthlySeries slice(YearMonth first, YearMonth last) const;
  /// Prefix ending at (and including) `last`.
  MonthlySeries prefix(YearMonth last) const { return slice(start_, last); }
  MonthlySeries with_values(std::vector<double> values) const {
    return MonthlySeries(start_, std::move(values), label_);
  }

 private:
  YearMonth start_;
  std::vector<double> values_;
  std::string label_;
};

/// Per-calendar-month long-term mean and sample standard deviation.
/// Index 0 is January.
struct PeriodicStats {
  MonthlyArray mean{};
  MonthlyArray std{};
  std::array<int, kMonths> count{};
};

/// 12-month trailing average of the series and its per-month moments.
struct AnnualStats {
  int window = 12;
  /// a_series[i] is the mean of the `window` values preceding element i; it is
  /// defined for i >= window and NaN before that.
  std::vector<double> a_series;
  MonthlyArray a_mean{};
  MonthlyArray a_std{};
  std::array<int, kMonths> count{};
};

/// Sample (N-1) standard deviation per month. With `require_std`, any month
/// holding fewer than two observations is an insufficient-data error.
PeriodicStats periodic_stats(const MonthlySeries& series, bool require_std = true);

/// Trailing-window averages; per-month std uses the 1/N divisor.
AnnualStats annual_stats(const MonthlySeries& series, int window = 12);

/// Mean of the `window` values before position `end` (exclusive).
double trailing_mean(std::span<const double> values, std::size_t end, int window);

/// (y_t - mean_m) / std_m. Throws kDegenerateMonth on a zero std.
std::vector<double> normalize(const MonthlySeries& series, const PeriodicStats& stats);

/// Inverse of normalize for a series starting at `start`.
std::vector<double> denormalize(std::span<const double> normalized, YearMonth start,
                                const PeriodicStats& stats);

const char* month_name(int month);

}  // namespace parpmon
