#include "parpmon/benchmarks.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "parpmon/error.hpp"
#include "parpmon/scenario.hpp"

namespace parpmon {

namespace {

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", w);
  return buf;
}

template <class T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto r = std::from_chars(text.data(), text.data() + text.size(), value);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
    fail(ErrorCode::kConfig, "bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string ForecasterSpec::id() const {
  switch (kind) {
    case ForecasterKind::kOfficialParpA: return "official_parpa";
    case ForecasterKind::kOfficialParp: return "official_parp";
    case ForecasterKind::kSeasonalNaive: return "seasonal_naive";
    case ForecasterKind::kWindowedParpA: return "windowed_parpa_J" + std::to_string(window_years.value_or(0));
    case ForecasterKind::kWeightedParpA: {
      std::string w = format_weight(recent_weight.value_or(0.0));
      for (char& c : w) {
        if (c == '.') c = 'p';
      }
      return "weighted_parpa_w" + w;
    }
    case ForecasterKind::kAltmParpA:
      return altm_window == 12 ? "altm_parpa" : "altm_parpa_M" + std::to_string(altm_window);
    case ForecasterKind::kPerfectForesight: return "perfect_foresight";
  }
  return "unknown";
}

std::string ForecasterSpec::label() const {
  switch (kind) {
    case ForecasterKind::kOfficialParpA: return "Official PARp-A";
    case ForecasterKind::kOfficialParp: return "Official PARp";
    case ForecasterKind::kSeasonalNaive: return "Seasonal Naive";
    case ForecasterKind::kWindowedParpA: return "PARp-A (J = " + std::to_string(window_years.value_or(0)) + ")";
    case ForecasterKind::kWeightedParpA: return "PARp-A (w = " + format_weight(recent_weight.value_or(0.0)) + ")";
    case ForecasterKind::kAltmParpA:
      return altm_window == 12 ? "ALTM PARp-A" : "ALTM PARp-A (M = " + std::to_string(altm_window) + ")";
    case ForecasterKind::kPerfectForesight: return "Perfect foresight";
  }
  return "unknown";
}

std::string ForecasterSpec::spec_string() const {
  switch (kind) {
    case ForecasterKind::kWindowedParpA: return "windowed_parpa:J=" + std::to_string(window_years.value_or(0));
    case ForecasterKind::kWeightedParpA: return "weighted_parpa:w=" + format_weight(recent_weight.value_or(0.0));
    case ForecasterKind::kAltmParpA: return "altm_parpa:M=" + std::to_string(altm_window);
    default: return id();
  }
}

void ForecasterSpec::validate() const {
  const bool windowed = kind == ForecasterKind::kWindowedParpA;
  const bool weighted = kind == ForecasterKind::kWeightedParpA;
  if (window_years.has_value() != windowed) {
    fail(ErrorCode::kConfig, "window J is required by, and only valid for, windowed_parpa");
  }
  if (recent_weight.has_value() != weighted) {
    fail(ErrorCode::kConfig, "weight w is required by, and only valid for, weighted_parpa");
  }
  if (windowed && *window_years < 1) fail(ErrorCode::kConfig, "window J must be at least 1 year");
  if (weighted && !(*recent_weight > 1.0)) fail(ErrorCode::kConfig, "weight w must be greater than 1");
  if (altm_window < 1) fail(ErrorCode::kConfig, "ALTM window M must be at least 1");
}

ForecasterSpec ForecasterSpec::parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  std::string_view name = text, param;
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    name = trim(text.substr(0, colon));
    param = trim(text.substr(colon + 1));
  }
  ForecasterSpec spec;
  std::string_view key, value;
  if (!param.empty()) {
    auto eq = param.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::kConfig, "expected key=value in '" + std::string(text) + "'");
    key = trim(param.substr(0, eq));
    value = trim(param.substr(eq + 1));
  }
  auto no_param = [&] {
    if (!param.empty()) fail(ErrorCode::kConfig, "forecaster '" + std::string(name) + "' takes no parameter");
  };
  if (name == "official_parpa") {
    no_param();
    spec.kind = ForecasterKind::kOfficialParpA;
  } else if (name == "official_parp") {
    no_param();
    spec.kind = ForecasterKind::kOfficialParp;
  } else if (name == "seasonal_naive") {
    no_param();
    spec.kind = ForecasterKind::kSeasonalNaive;
  } else if (name == "perfect_foresight") {
    no_param();
    spec.kind = ForecasterKind::kPerfectForesight;
  } else if (name == "windowed_parpa") {
    if (key != "J") fail(ErrorCode::kConfig, "windowed_parpa needs J=<years>");
    spec.kind = ForecasterKind::kWindowedParpA;
    spec.window_years = parse_number<int>(value, "window J");
  } else if (name == "weighted_parpa") {
    if (key != "w") fail(ErrorCode::kConfig, "weighted_parpa needs w=<weight>");
    spec.kind = ForecasterKind::kWeightedParpA;
    spec.recent_weight = parse_number<double>(value, "weight w");
  } else if (name == "altm_parpa") {
    spec.kind = ForecasterKind::kAltmParpA;
    if (!param.empty()) {
      if (key != "M") fail(ErrorCode::kConfig, "altm_parpa takes M=<months>");
      spec.altm_window = parse_number<int>(value, "ALTM window M");
    }
  } else {
    fail(ErrorCode::kConfig, "unknown forecaster '" + std::string(name) + "'");
  }
  spec.validate();
  return spec;
}

std::vector<double> seasonal_naive_forecast(const MonthlySeries& history, int horizon) {
  if (horizon < 1) fail(ErrorCode::kInvalidArgument, "forecast horizon must be at least 1");
  if (history.size() < static_cast<std::size_t>(kMonths)) {
    fail(ErrorCode::kInsufficientData, "seasonal naive needs at least 12 months of history");
  }
  const std::size_t n = history.size();
  std::vector<double> out(horizon);
  for (int k = 1; k <= horizon; ++k) {
    // Latest observed occurrence of the target's calendar month.
    out[k - 1] = history[n - 13 + static_cast<std::size_t>((k - 1) % kMonths + 1)];
  }
  return out;
}

PeriodicModel official_fit(const MonthlySeries& series, ModelKind kind, const EstimationSettings& settings) {
  if (kind == ModelKind::kParpA && series.size() <= static_cast<std::size_t>(kMonths)) {
    fail(ErrorCode::kInsufficientData, "PARp-A needs more than 12 months of data");
  }
  MonthlyOrders orders = select_orders(series, settings.p_max);
  return fit_periodic(series, orders, kind, {.method = settings.method});
}

PeriodicModel windowed_fit(const MonthlySeries& series, int years, const EstimationSettings& settings) {
  if (years < 1) fail(ErrorCode::kInvalidArgument, "window must be at least one year");
  const std::size_t months = static_cast<std::size_t>(years) * kMonths;
  if (months >= series.size()) return official_fit(series, ModelKind::kParpA, settings);
  MonthlySeries recent = series.slice(series.end() - static_cast<int>(months - 1), series.end());
  return official_fit(recent, ModelKind::kParpA, settings);
}

PeriodicModel weighted_fit(const MonthlySeries& series, double weight, const EstimationSettings& settings) {
  if (!(weight > 1.0) || !std::isfinite(weight)) {
    fail(ErrorCode::kInvalidArgument, "recency weight must be greater than 1");
  }
  MonthlyOrders orders = select_orders(series, settings.p_max);
  FitOptions options;
  options.method = EstimationMethod::kLeastSquares;
  options.recent_weight = weight;
  options.recent_months = kMonths;
  return fit_periodic(series, orders, ModelKind::kParpA, options);
}

MonthlySeries altm_transform(const MonthlySeries& series, int window) {
  if (window < 1) fail(ErrorCode::kInvalidArgument, "ALTM window must be at least 1");
  if (series.size() <= static_cast<std::size_t>(window)) {
    fail(ErrorCode::kInsufficientData, "ALTM needs more than " + std::to_string(window) + " values");
  }
  const std::size_t n = series.size();
  std::vector<double> z(n), level(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = std::log(series[i]);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t first = i + 1 >= static_cast<std::size_t>(window) ? i + 1 - window : 0;
    double s = 0.0;
    for (std::size_t j = first; j <= i; ++j) s += z[j];
    level[i] = s / static_cast<double>(i - first + 1);
  }
  const double target = level[n - 1];
  std::vector<double> adjusted(n);
  for (std::size_t i = 0; i < n; ++i) adjusted[i] = std::exp(z[i] - level[i] + target);
  return series.with_values(std::move(adjusted));
}

PeriodicModel altm_fit(const MonthlySeries& series, int window, const EstimationSettings& settings) {
  return official_fit(altm_transform(series, window), ModelKind::kParpA, settings);
}

namespace {

class SeasonalNaiveForecaster final : public Forecaster {
 public:
  std::string id() const override { return "seasonal_naive"; }
  std::vector<double> forecast(const MonthlySeries& history, int horizon, std::uint64_t) const override {
    return seasonal_naive_forecast(history, horizon);
  }
};

class ModelForecaster final : public Forecaster {
 public:
  ModelForecaster(ForecasterSpec spec, EstimationSettings settings) : spec_(spec), settings_(settings) {}

  std::string id() const override { return spec_.id(); }

  std::vector<double> forecast(const MonthlySeries& history, int horizon, std::uint64_t seed) const override {
    const MonthlySeries state =
        spec_.kind == ForecasterKind::kAltmParpA ? altm_transform(history, spec_.altm_window) : history;
    if (settings_.estimation_lag < 0) fail(ErrorCode::kInvalidArgument, "estimation lag must be non-negative");
    if (static_cast<std::size_t>(settings_.estimation_lag) >= state.size()) {
      fail(ErrorCode::kInsufficientData, "estimation lag leaves no data");
    }
    const MonthlySeries estimation =
        settings_.estimation_lag > 0 ? state.prefix(state.end() - settings_.estimation_lag) : state;
    const PeriodicModel model = fit(estimation);
    if (settings_.functional == ForecastFunctional::kDeterministic) return point_forecast(model, state, horizon);

    SimulationOptions options;
    options.horizon = horizon;
    options.omega_count = settings_.omega_count;
    options.seed = seed;
    const ScenarioPanel panel =
        simulate(std::span(&model, 1), std::span(&state, 1), CorrelationSet::identity(1), options);
    return panel.mean_forecast(0);
  }

 private:
  PeriodicModel fit(const MonthlySeries& data) const {
    switch (spec_.kind) {
      case ForecasterKind::kOfficialParp: return official_fit(data, ModelKind::kParp, settings_);
      case ForecasterKind::kWindowedParpA: return windowed_fit(data, *spec_.window_years, settings_);
      case ForecasterKind::kWeightedParpA: return weighted_fit(data, *spec_.recent_weight, settings_);
      // The ALTM adjustment was already applied to the forecast state.
      case ForecasterKind::kAltmParpA:
      default: return official_fit(data, ModelKind::kParpA, settings_);
    }
  }

  ForecasterSpec spec_;
  EstimationSettings settings_;
};

class PerfectForesight final : public Forecaster {
 public:
  explicit PerfectForesight(MonthlySeries truth) : truth_(std::move(truth)) {}
  std::string id() const override { return "perfect_foresight"; }
  std::vector<double> forecast(const MonthlySeries& history, int horizon, std::uint64_t) const override {
    std::vector<double> out(horizon);
    for (int k = 1; k <= horizon; ++k) out[k - 1] = truth_[truth_.index_of(history.end() + k)];
    return out;
  }

 private:
  MonthlySeries truth_;
};

}  // namespace

std::unique_ptr<Forecaster> make_forecaster(const ForecasterSpec& spec, const EstimationSettings& settings) {
  spec.validate();
  switch (spec.kind) {
    case ForecasterKind::kSeasonalNaive: return std::make_unique<SeasonalNaiveForecaster>();
    case ForecasterKind::kPerfectForesight:
      fail(ErrorCode::kInvalidArgument, "perfect foresight needs the realized series; use make_perfect_foresight");
    default: return std::make_unique<ModelForecaster>(spec, settings);
  }
}

std::unique_ptr<Forecaster> make_perfect_foresight(MonthlySeries truth) {
  return std::make_unique<PerfectForesight>(std::move(truth));
}

}  // namespace parpmon
