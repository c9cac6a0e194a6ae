#include "parpmon/series.hpp"

#include <cmath>
#include <limits>

#include "parpmon/error.hpp"

namespace parpmon {

namespace {
constexpr std::array<const char*, kMonths> kMonthNames = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
}

const char* month_name(int month) { return kMonthNames[(month - 1) % kMonths]; }

MonthlySeries::MonthlySeries(YearMonth start, std::vector<double> values, std::string label)
    : start_(start), values_(std::move(values)), label_(std::move(label)) {
  if (start_.month < 1 || start_.month > 12) {
    fail(ErrorCode::kInvalidArgument, "start month must be in 1..12");
  }
  if (values_.empty()) fail(ErrorCode::kInsufficientData, "series must hold at least one value");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] <= 0.0) {
      fail(ErrorCode::kValidation, "value at " + stamp(i).str() + " must be finite and positive");
    }
  }
}

std::size_t MonthlySeries::index_of(YearMonth when) const {
  int offset = when - start_;
  if (offset < 0 || offset >= static_cast<int>(values_.size())) {
    fail(ErrorCode::kInvalidArgument, when.str() + " lies outside " + start_.str() + ".." + end().str());
  }
  return static_cast<std::size_t>(offset);
}

MonthlySeries MonthlySeries::slice(YearMonth first, YearMonth last) const {
  std::size_t a = index_of(first);
  std::size_t b = index_of(last);
  if (b < a) fail(ErrorCode::kInvalidArgument, "empty slice " + first.str() + ".." + last.str());
  return MonthlySeries(first, std::vector<double>(values_.begin() + a, values_.begin() + b + 1), label_);
}

PeriodicStats periodic_stats(const MonthlySeries& series, bool require_std) {
  PeriodicStats out;
  MonthlyArray sum{};
  for (std::size_t i = 0; i < series.size(); ++i) {
    int m = series.month_of(i) - 1;
    sum[m] += series[i];
    ++out.count[m];
  }
  for (int m = 0; m < kMonths; ++m) {
    out.mean[m] = out.count[m] > 0 ? sum[m] / out.count[m] : std::numeric_limits<double>::quiet_NaN();
  }
  MonthlyArray ss{};
  for (std::size_t i = 0; i < series.size(); ++i) {
    int m = series.month_of(i) - 1;
    double d = series[i] - out.mean[m];
    ss[m] += d * d;
  }
  for (int m = 0; m < kMonths; ++m) {
    if (out.count[m] < 2) {
      if (require_std) {
        fail(ErrorCode::kInsufficientData,
             std::string("month ") + month_name(m + 1) + " has fewer than 2 observations");
      }
      out.std[m] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    out.std[m] = std::sqrt(ss[m] / (out.count[m] - 1));
  }
  return out;
}

double trailing_mean(std::span<const double> values, std::size_t end, int window) {
  double s = 0.0;
  for (std::size_t j = end - window; j < end; ++j) s += values[j];
  return s / window;
}

AnnualStats annual_stats(const MonthlySeries& series, int window) {
  if (window < 1) fail(ErrorCode::kInvalidArgument, "annual window must be positive");
  if (series.size() <= static_cast<std::size_t>(window)) {
    fail(ErrorCode::kInsufficientData, "series of length " + std::to_string(series.size()) +
                                           " is too short for a " + std::to_string(window) +
                                           "-month trailing average");
  }
  AnnualStats out;
  out.window = window;
  out.a_series.assign(series.size(), std::numeric_limits<double>::quiet_NaN());
  MonthlyArray sum{};
  for (std::size_t i = window; i < series.size(); ++i) {
    out.a_series[i] = trailing_mean(series.values(), i, window);
    int m = series.month_of(i) - 1;
    sum[m] += out.a_series[i];
    ++out.count[m];
  }
  MonthlyArray ss{};
  for (int m = 0; m < kMonths; ++m) {
    out.a_mean[m] = out.count[m] > 0 ? sum[m] / out.count[m] : std::numeric_limits<double>::quiet_NaN();
  }
  for (std::size_t i = window; i < series.size(); ++i) {
    int m = series.month_of(i) - 1;
    double d = out.a_series[i] - out.a_mean[m];
    ss[m] += d * d;
  }
  for (int m = 0; m < kMonths; ++m) {
    out.a_std[m] = out.count[m] > 0 ? std::sqrt(ss[m] / out.count[m]) : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

std::vector<double> normalize(const MonthlySeries& series, const PeriodicStats& stats) {
  std::vector<double> z(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    int m = series.month_of(i) - 1;
    if (!(stats.std[m] > 0.0)) {
      fail(ErrorCode::kDegenerateMonth, std::string("month ") + month_name(m + 1) + " has zero standard deviation");
    }
    z[i] = (series[i] - stats.mean[m]) / stats.std[m];
  }
  return z;
}

std::vector<double> denormalize(std::span<const double> normalized, YearMonth start, const PeriodicStats& stats) {
  std::vector<double> y(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    int m = (start.month - 1 + static_cast<int>(i)) % kMonths;
    y[i] = stats.mean[m] + stats.std[m] * normalized[i];
  }
  return y;
}

}  // namespace parpmon
