#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "parpmon/series.hpp"

namespace parpmon {

enum class ModelKind { kParp, kParpA };
enum class EstimationMethod { kYuleWalker, kLeastSquares };

using MonthlyOrders = std::array<int, kMonths>;

/// Fitted periodic autoregression on the per-month normalized scale.
///
/// For a target in calendar month m with normalized value z_t:
///   z_t = sum_i phi[m][i] * z_{t-1-i} + psi[m] * a_t + e_t
/// where a_t is the normalized trailing 12-month average (PARp-A only) and
/// e_t has zero mean and standard deviation resid_std[m].
struct PeriodicModel {
  ModelKind kind = ModelKind::kParp;
  MonthlyOrders orders{};
  std::array<std::vector<double>, kMonths> phi;
  MonthlyArray psi{};  // all zero for PARp
  MonthlyArray resid_std{};
  PeriodicStats stats;
  std::optional<AnnualStats> annual;  // present iff kind == kParpA

  /// Calendar window the model was estimated on.
  YearMonth fit_start;
  YearMonth fit_end;
  /// In-sample normalized residuals aligned with the fit window; NaN where the
  /// element was not a regression target.
  std::vector<double> residuals;

  bool has_annual() const { return kind == ModelKind::kParpA; }
  int annual_window() const { return annual ? annual->window : 0; }
  /// Number of past values the recursion reads at any step.
  std::size_t required_history() const;
};

/// Knobs shared by the estimators. The defaults reproduce plain PARp / PARp-A
/// estimation; the benchmark variants use the rest.
struct FitOptions {
  EstimationMethod method = EstimationMethod::kYuleWalker;
  /// Weight on the squared error of regression rows whose target lies in the
  /// last `recent_months` of the series. Least squares only.
  double recent_weight = 1.0;
  int recent_months = 12;
  /// Earliest target index admitted as a regression row.
  std::size_t first_row = 0;
  /// Keep the annual regressor's rows but force its coefficient to zero.
  bool fix_psi_zero = false;
};

/// Sample periodic autocorrelation between normalized values of `month` and
/// the values `lag` months earlier. Lag 0 is exactly 1.
double periodic_autocorrelation(std::span<const double> normalized, YearMonth start, int month,
                                int lag);

/// Sample periodic partial autocorrelation of `month` at lags 1..max_lag.
/// Stops early (shorter result) if a Yule-Walker system turns singular.
std::vector<double> periodic_pacf(std::span<const double> normalized, YearMonth start, int month,
                                  int max_lag);

/// Per month, the largest lag <= p_max whose |PACF| exceeds 1.96/sqrt(N_m);
/// order 1 when no lag is significant.
MonthlyOrders select_orders(const MonthlySeries& series, int p_max = 6);

PeriodicModel fit_periodic(const MonthlySeries& series, const MonthlyOrders& orders, ModelKind kind,
                           const FitOptions& options = {});

inline PeriodicModel fit_parp(const MonthlySeries& series, const MonthlyOrders& orders,
                              EstimationMethod method = EstimationMethod::kYuleWalker) {
  return fit_periodic(series, orders, ModelKind::kParp, {.method = method});
}

inline PeriodicModel fit_parpa(const MonthlySeries& series, const MonthlyOrders& orders,
                               EstimationMethod method = EstimationMethod::kYuleWalker) {
  return fit_periodic(series, orders, ModelKind::kParpA, {.method = method});
}

/// Deterministic part of the recursion on the normalized scale for the value
/// that follows `past` (whose last element is the period right before the
/// target). `past` holds raw values in the original units.
double conditional_mean_normalized(const PeriodicModel& model, std::span<const double> past,
                                   int target_month);

/// Zero-noise K-step recursion from the end of `history`. The trailing average
/// is rolled forward with forecast values once they enter its window.
std::vector<double> point_forecast(const PeriodicModel& model, const MonthlySeries& history, int horizon);

}  // namespace parpmon
