#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parpmon/benchmarks.hpp"
#include "parpmon/series.hpp"

namespace parpmon {

/// Forecasts are issued in months first..last: the first origin (last observed
/// month) is first - 1 and no target lies after `last`.
struct EvaluationSpan {
  YearMonth first;
  YearMonth last;
};

struct OriginLog {
  YearMonth origin;
  bool ok = true;
  std::string message;
};

/// k-step out-of-sample errors, error = forecast - observed (positive means
/// the forecast was optimistic). Rows are time-ordered by origin; a row is
/// shorter than the horizon when its targets run past the span.
struct ErrorPanel {
  std::string forecaster;
  std::string subsystem;
  int horizon = 0;
  std::vector<YearMonth> origins;
  std::vector<std::vector<double>> forecasts;
  std::vector<std::vector<double>> observed;
  std::vector<OriginLog> log;

  double error(std::size_t row, int k) const { return forecasts[row][k - 1] - observed[row][k - 1]; }
  /// Time-ordered k-step errors.
  std::vector<double> errors_at(int k) const;
  /// Time-ordered observations at the k-step targets.
  std::vector<double> observed_at(int k) const;
  /// n_k for k = 1..horizon.
  std::vector<int> counts() const;
};

struct BacktestOptions {
  int horizon = 24;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Rolling-origin evaluation: at every origin the forecaster only ever sees
/// the prefix ending at that origin. Fit failures are logged and skipped.
ErrorPanel rolling_backtest(const MonthlySeries& series, const Forecaster& forecaster,
                            const EvaluationSpan& span, const BacktestOptions& options);

/// Seed handed to the forecaster at a given origin.
std::uint64_t origin_seed(std::uint64_t root, YearMonth origin);

/// Mean k-step error.
double bias(const ErrorPanel& panel, int k);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
  double long_run_variance = 0.0;
  /// The Bartlett sum came out negative and gamma(0) was used instead.
  bool fallback = false;
};

/// Bartlett-weighted long-run variance: sum over |h| < sqrt(n) of
/// (1 - |h|/sqrt(n)) * gamma(h), gamma with the 1/n divisor.
double bartlett_variance(const std::vector<double>& errors, bool* fell_back = nullptr);

/// bias +- z * sqrt(v / n). Requires n_k >= 4.
ConfidenceInterval bias_ci(const ErrorPanel& panel, int k, double z = 1.96);

/// Per qualifying origin (all K horizons realized), the sum of errors over
/// k = 1..K, accumulated in k order.
std::vector<double> cumulative_errors(const ErrorPanel& panel, int horizon);
/// Mean of cumulative_errors.
double cumulative_bias(const ErrorPanel& panel, int horizon);

enum class PctBiasMode { kRatioOfMeans, kMeanOfRatios };

/// Bias as a percentage of observed values at the same targets.
double pct_bias(const ErrorPanel& panel, const MonthlySeries& observed, int k,
                PctBiasMode mode = PctBiasMode::kRatioOfMeans);
/// Same, reading the observations stored in the panel.
double pct_bias(const ErrorPanel& panel, int k, PctBiasMode mode = PctBiasMode::kRatioOfMeans);

struct BiasRow {
  int k = 0;
  int n = 0;
  double bias = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double pct_bias = 0.0;
  bool ci_fallback = false;
};

struct BiasReport {
  std::string forecaster;
  std::string subsystem;
  std::vector<BiasRow> rows;
  /// NaN when no origin has all K horizons realized.
  double cumulative_bias = 0.0;
  int cumulative_count = 0;
  std::vector<std::string> warnings;
};

BiasReport make_report(const ErrorPanel& panel, PctBiasMode mode = PctBiasMode::kRatioOfMeans);

}  // namespace parpmon
