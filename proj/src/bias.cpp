#include "parpmon/bias.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <thread>

#include "parpmon/error.hpp"
#include "parpmon/rng.hpp"

namespace parpmon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_k(const ErrorPanel& panel, int k) {
  if (k < 1 || k > panel.horizon) {
    fail(ErrorCode::kInvalidArgument, "horizon k = " + std::to_string(k) + " outside 1.." + std::to_string(panel.horizon));
  }
}

struct OriginOutcome {
  std::optional<std::vector<double>> forecast;
  std::string message;
};

}  // namespace

std::vector<double> ErrorPanel::errors_at(int k) const {
  std::vector<double> out;
  for (std::size_t r = 0; r < origins.size(); ++r) {
    if (forecasts[r].size() >= static_cast<std::size_t>(k)) out.push_back(error(r, k));
  }
  return out;
}

std::vector<double> ErrorPanel::observed_at(int k) const {
  std::vector<double> out;
  for (std::size_t r = 0; r < origins.size(); ++r) {
    if (observed[r].size() >= static_cast<std::size_t>(k)) out.push_back(observed[r][k - 1]);
  }
  return out;
}

std::vector<int> ErrorPanel::counts() const {
  std::vector<int> n(horizon, 0);
  for (const auto& row : forecasts) {
    for (std::size_t k = 0; k < row.size(); ++k) ++n[k];
  }
  return n;
}

std::uint64_t origin_seed(std::uint64_t root, YearMonth origin) {
  return derive_seed(root, {static_cast<std::uint64_t>(origin.ordinal())});
}

ErrorPanel rolling_backtest(const MonthlySeries& series, const Forecaster& forecaster, const EvaluationSpan& span,
                            const BacktestOptions& options) {
  if (options.horizon < 1) fail(ErrorCode::kInvalidArgument, "horizon K must be at least 1");
  if (options.threads < 1) fail(ErrorCode::kInvalidArgument, "thread count must be at least 1");
  if (span.last < span.first) {
    fail(ErrorCode::kInvalidArgument, "empty evaluation span " + span.first.str() + ".." + span.last.str());
  }
  const YearMonth first_origin = span.first - 1;
  const YearMonth last_target = std::min(span.last, series.end());
  if (first_origin < series.start()) {
    fail(ErrorCode::kInsufficientData, "evaluation starts before any observation is available");
  }
  if (last_target <= first_origin) {
    fail(ErrorCode::kInvalidArgument, "evaluation span " + span.first.str() + ".." + span.last.str() +
                                          " has no realized target in the data");
  }
  const int origin_count = last_target - first_origin;

  std::vector<OriginOutcome> outcomes(origin_count);
  auto evaluate = [&](int i) {
    const YearMonth origin = first_origin + i;
    const int steps = std::min(options.horizon, last_target - origin);
    try {
      // The forecaster never sees anything after the origin.
      const MonthlySeries history = series.prefix(origin);
      std::vector<double> f = forecaster.forecast(history, steps, origin_seed(options.seed, origin));
      if (f.size() != static_cast<std::size_t>(steps)) {
        fail(ErrorCode::kInvalidArgument, "forecaster returned " + std::to_string(f.size()) + " values, expected " +
                                              std::to_string(steps));
      }
      for (double v : f) {
        if (!std::isfinite(v)) fail(ErrorCode::kValidation, "forecaster returned a non-finite value");
      }
      outcomes[i].forecast = std::move(f);
    } catch (const Error& e) {
      outcomes[i].message = std::string(to_string(e.code())) + ": " + e.what();
    }
  };

  const int threads = std::min(options.threads, origin_count);
  if (threads == 1) {
    for (int i = 0; i < origin_count; ++i) evaluate(i);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (int i = t; i < origin_count; i += threads) evaluate(i);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ErrorPanel panel;
  panel.forecaster = forecaster.id();
  panel.subsystem = series.label();
  panel.horizon = options.horizon;
  for (int i = 0; i < origin_count; ++i) {
    const YearMonth origin = first_origin + i;
    if (!outcomes[i].forecast) {
      panel.log.push_back({origin, false, outcomes[i].message});
      continue;
    }
    panel.log.push_back({origin, true, {}});
    const std::size_t at = series.index_of(origin);
    std::vector<double> obs(outcomes[i].forecast->size());
    for (std::size_t k = 0; k < obs.size(); ++k) obs[k] = series[at + 1 + k];
    panel.origins.push_back(origin);
    panel.forecasts.push_back(std::move(*outcomes[i].forecast));
    panel.observed.push_back(std::move(obs));
  }
  return panel;
}

double bias(const ErrorPanel& panel, int k) {
  check_k(panel, k);
  const std::vector<double> e = panel.errors_at(k);
  if (e.empty()) fail(ErrorCode::kInsufficientData, "no " + std::to_string(k) + "-step errors");
  double s = 0.0;
  for (double v : e) s += v;
  return s / static_cast<double>(e.size());
}

double bartlett_variance(const std::vector<double>& errors, bool* fell_back) {
  const std::size_t n = errors.size();
  if (n == 0) fail(ErrorCode::kInsufficientData, "empty error sequence");
  double mean = 0.0;
  for (double v : errors) mean += v;
  mean /= static_cast<double>(n);
  auto gamma = [&](std::size_t h) {
    double s = 0.0;
    for (std::size_t t = 0; t + h < n; ++t) s += (errors[t] - mean) * (errors[t + h] - mean);
    return s / static_cast<double>(n);
  };
  const double root = std::sqrt(static_cast<double>(n));
  const double g0 = gamma(0);
  double v = g0;
  for (std::size_t h = 1; static_cast<double>(h) < root && h < n; ++h) {
    v += 2.0 * (1.0 - static_cast<double>(h) / root) * gamma(h);
  }
  const bool negative = v < 0.0;
  if (fell_back) *fell_back = negative;
  return negative ? g0 : v;
}

ConfidenceInterval bias_ci(const ErrorPanel& panel, int k, double z) {
  check_k(panel, k);
  const std::vector<double> e = panel.errors_at(k);
  if (e.size() < 4) {
    fail(ErrorCode::kInsufficientData, "confidence interval needs n_k >= 4, got " + std::to_string(e.size()));
  }
  ConfidenceInterval ci;
  const double center = bias(panel, k);
  ci.long_run_variance = bartlett_variance(e, &ci.fallback);
  const double half = z * std::sqrt(ci.long_run_variance / static_cast<double>(e.size()));
  ci.low = center - half;
  ci.high = center + half;
  return ci;
}

std::vector<double> cumulative_errors(const ErrorPanel& panel, int horizon) {
  check_k(panel, horizon);
  std::vector<double> out;
  for (std::size_t r = 0; r < panel.origins.size(); ++r) {
    if (panel.forecasts[r].size() < static_cast<std::size_t>(horizon)) continue;
    double s = 0.0;
    for (int k = 1; k <= horizon; ++k) s += panel.error(r, k);
    out.push_back(s);
  }
  return out;
}

double cumulative_bias(const ErrorPanel& panel, int horizon) {
  const std::vector<double> c = cumulative_errors(panel, horizon);
  if (c.empty()) {
    fail(ErrorCode::kInsufficientData, "no origin has all " + std::to_string(horizon) + " horizons realized");
  }
  double s = 0.0;
  for (double v : c) s += v;
  return s / static_cast<double>(c.size());
}

namespace {

double pct_from(const std::vector<double>& errors, const std::vector<double>& obs, PctBiasMode mode) {
  if (errors.empty()) fail(ErrorCode::kInsufficientData, "no errors at this horizon");
  const double n = static_cast<double>(errors.size());
  if (mode == PctBiasMode::kMeanOfRatios) {
    double s = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) s += errors[i] / obs[i];
    return 100.0 * s / n;
  }
  double se = 0.0, so = 0.0;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    se += errors[i];
    so += obs[i];
  }
  if (!(so > 0.0)) fail(ErrorCode::kValidation, "mean observed value is not positive");
  return 100.0 * (se / n) / (so / n);
}

}  // namespace

double pct_bias(const ErrorPanel& panel, const MonthlySeries& observed, int k, PctBiasMode mode) {
  check_k(panel, k);
  std::vector<double> e, obs;
  for (std::size_t r = 0; r < panel.origins.size(); ++r) {
    if (panel.forecasts[r].size() < static_cast<std::size_t>(k)) continue;
    const double y = observed[observed.index_of(panel.origins[r] + k)];
    e.push_back(panel.forecasts[r][k - 1] - y);
    obs.push_back(y);
  }
  return pct_from(e, obs, mode);
}

double pct_bias(const ErrorPanel& panel, int k, PctBiasMode mode) {
  check_k(panel, k);
  return pct_from(panel.errors_at(k), panel.observed_at(k), mode);
}

BiasReport make_report(const ErrorPanel& panel, PctBiasMode mode) {
  BiasReport report;
  report.forecaster = panel.forecaster;
  report.subsystem = panel.subsystem;
  const std::vector<int> n = panel.counts();
  for (int k = 1; k <= panel.horizon; ++k) {
    if (n[k - 1] == 0) continue;
    BiasRow row;
    row.k = k;
    row.n = n[k - 1];
    row.bias = bias(panel, k);
    if (row.n >= 4) {
      ConfidenceInterval ci = bias_ci(panel, k);
      row.ci_low = ci.low;
      row.ci_high = ci.high;
      row.ci_fallback = ci.fallback;
      if (ci.fallback) {
        report.warnings.push_back("k=" + std::to_string(k) + ": negative Bartlett variance, used gamma(0)");
      }
    } else {
      row.ci_low = row.ci_high = kNaN;
    }
    row.pct_bias = pct_bias(panel, k, mode);
    report.rows.push_back(row);
  }
  const std::vector<double> c = panel.horizon > 0 ? cumulative_errors(panel, panel.horizon) : std::vector<double>{};
  report.cumulative_count = static_cast<int>(c.size());
  if (c.empty()) {
    report.cumulative_bias = kNaN;
    report.warnings.push_back("no origin has all " + std::to_string(panel.horizon) + " horizons realized");
  } else {
    report.cumulative_bias = cumulative_bias(panel, panel.horizon);
  }
  for (const auto& entry : panel.log) {
    if (!entry.ok) report.warnings.push_back("origin " + entry.origin.str() + " skipped: " + entry.message);
  }
  return report;
}

}  // namespace parpmon
