#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parpmon/parp.hpp"

namespace parpmon {

enum class ForecasterKind {
  kOfficialParpA,
  kOfficialParp,
  kSeasonalNaive,
  kWindowedParpA,
  kWeightedParpA,
  kAltmParpA,
  /// Diagnostic only: returns the realized future. Needs the full series, so
  /// it can only be built by the run layer, never from history alone.
  kPerfectForesight,
};

enum class ForecastFunctional { kScenarioMean, kDeterministic };

/// Estimation and forecasting settings shared by every PARp-family forecaster.
struct EstimationSettings {
  int p_max = 6;
  EstimationMethod method = EstimationMethod::kYuleWalker;
  /// Months of the most recent data withheld from estimation (the forecast
  /// state still uses everything up to the origin).
  int estimation_lag = 0;
  ForecastFunctional functional = ForecastFunctional::kScenarioMean;
  int omega_count = 2000;
};

struct ForecasterSpec {
  ForecasterKind kind = ForecasterKind::kOfficialParpA;
  std::optional<int> window_years;     // windowed only
  std::optional<double> recent_weight; // weighted only
  int altm_window = 12;

  /// File-safe identifier, e.g. "windowed_parpa_J30".
  std::string id() const;
  /// Table label, e.g. "PARp-A (J = 30)".
  std::string label() const;
  /// Inverse of parse, e.g. "windowed_parpa:J=30".
  std::string spec_string() const;
  void validate() const;

  /// Accepts "official_parpa", "official_parp", "seasonal_naive",
  /// "windowed_parpa:J=30", "weighted_parpa:w=2", "altm_parpa[:M=12]",
  /// "perfect_foresight".
  static ForecasterSpec parse(std::string_view text);
};

/// y_{t+k-12} for k <= 12; beyond that the most recent observed value of the
/// target's calendar month.
std::vector<double> seasonal_naive_forecast(const MonthlySeries& history, int horizon);

/// Official pipeline: order selection then PARp / PARp-A estimation.
PeriodicModel official_fit(const MonthlySeries& series, ModelKind kind, const EstimationSettings& settings);

/// PARp-A on the last `years` years of the series (whole series if shorter).
PeriodicModel windowed_fit(const MonthlySeries& series, int years, const EstimationSettings& settings);

/// PARp-A by weighted least squares; rows whose target is in the last 12
/// months carry weight `weight` (> 1) on their squared error.
PeriodicModel weighted_fit(const MonthlySeries& series, double weight, const EstimationSettings& settings);

/// Log-scale local-level adjustment:
///   z = ln y, A_t = mean(z_{t-M+1..t}), z~_t = z_t - A_t + A_T, y~ = exp(z~).
/// Before a full window is available A_t averages the available prefix.
MonthlySeries altm_transform(const MonthlySeries& series, int window = 12);

/// PARp-A fitted on altm_transform(series).
PeriodicModel altm_fit(const MonthlySeries& series, int window, const EstimationSettings& settings);

/// Uniform forecasting surface consumed by the backtest harness.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::string id() const = 0;
  /// K-step forecast from the end of `history`, which holds every observation
  /// up to and including the origin and nothing after it.
  virtual std::vector<double> forecast(const MonthlySeries& history, int horizon,
                                       std::uint64_t seed) const = 0;
};

/// Builds a forecaster for any kind except kPerfectForesight.
std::unique_ptr<Forecaster> make_forecaster(const ForecasterSpec& spec, const EstimationSettings& settings);

/// Looks up the realized values in `truth`; diagnostic for harness checks.
std::unique_ptr<Forecaster> make_perfect_foresight(MonthlySeries truth);

}  // namespace parpmon
