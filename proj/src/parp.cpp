#include "parpmon/parp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "parpmon/error.hpp"

namespace parpmon {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 1-based calendar month `back` months before `month`.
int month_back(int month, int back) { return ((month - 1 - back) % kMonths + kMonths) % kMonths + 1; }

int month_at(YearMonth start, std::size_t i) { return (start.month - 1 + static_cast<int>(i)) % kMonths + 1; }

std::string month_label(int month) { return std::string("month ") + month_name(month); }

// Correlation-style moment between two aligned sequences over index pairs
// (i, i - lag) where i is a target of `month`.
template <class Lhs, class Rhs>
double paired_moment(std::size_t n, YearMonth start, int month, int lag, std::size_t first, Lhs lhs, Rhs rhs) {
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = std::max<std::size_t>(first, lag); i < n; ++i) {
    if (month_at(start, i) != month) continue;
    double x = lhs(i), y = rhs(i - lag);
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  double den = std::sqrt(sxx * syy);
  return den > 0.0 ? sxy / den : 0.0;
}

// Periodic autocorrelation table rho[m][lag], m 1-based, lag 0..max_lag.
class AutocorrelationTable {
 public:
  AutocorrelationTable(std::span<const double> z, YearMonth start, int max_lag) : max_lag_(max_lag) {
    table_.resize(kMonths * (max_lag + 1));
    for (int m = 1; m <= kMonths; ++m) {
      for (int lag = 0; lag <= max_lag; ++lag) table_[index(m, lag)] = periodic_autocorrelation(z, start, m, lag);
    }
  }
  double operator()(int month, int lag) const { return table_[index(month, lag)]; }

 private:
  std::size_t index(int month, int lag) const { return (month - 1) * (max_lag_ + 1) + lag; }
  int max_lag_;
  std::vector<double> table_;
};

// Periodic Yule-Walker matrix for target `month` and `order` lags:
//   R(i, j) = rho_{month - min(i, j)}(|i - j|),  r(i) = rho_month(i).
void yule_walker_lag_block(const AutocorrelationTable& rho, int month, int order, Eigen::MatrixXd& R,
                           Eigen::VectorXd& r) {
  for (int i = 1; i <= order; ++i) {
    r(i - 1) = rho(month, i);
    for (int j = 1; j <= order; ++j) {
      int near = std::min(i, j);
      R(i - 1, j - 1) = i == j ? 1.0 : rho(month_back(month, near), std::abs(i - j));
    }
  }
}

bool solve_checked(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, Eigen::VectorXd& x) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) return false;
  x = lu.solve(b);
  return x.allFinite();
}

}  // namespace

std::size_t PeriodicModel::required_history() const {
  int need = *std::max_element(orders.begin(), orders.end());
  if (has_annual()) need = std::max(need, annual_window());
  return static_cast<std::size_t>(need);
}

double periodic_autocorrelation(std::span<const double> normalized, YearMonth start, int month, int lag) {
  if (lag == 0) return 1.0;
  return paired_moment(normalized.size(), start, month, lag, 0,
                       [&](std::size_t i) { return normalized[i]; },
                       [&](std::size_t i) { return normalized[i]; });
}

std::vector<double> periodic_pacf(std::span<const double> normalized, YearMonth start, int month, int max_lag) {
  AutocorrelationTable rho(normalized, start, max_lag);
  std::vector<double> pacf;
  for (int lag = 1; lag <= max_lag; ++lag) {
    Eigen::MatrixXd R(lag, lag);
    Eigen::VectorXd r(lag), phi;
    yule_walker_lag_block(rho, month, lag, R, r);
    if (!solve_checked(R, r, phi)) break;
    pacf.push_back(phi(lag - 1));
  }
  return pacf;
}

MonthlyOrders select_orders(const MonthlySeries& series, int p_max) {
  if (p_max < 1) fail(ErrorCode::kInvalidArgument, "p_max must be at least 1");
  PeriodicStats stats = periodic_stats(series);
  std::vector<double> z = normalize(series, stats);
  AutocorrelationTable rho(z, series.start(), p_max);
  MonthlyOrders orders{};
  for (int m = 1; m <= kMonths; ++m) {
    double threshold = 1.96 / std::sqrt(static_cast<double>(stats.count[m - 1]));
    int chosen = 1;
    for (int lag = 1; lag <= p_max; ++lag) {
      Eigen::MatrixXd R(lag, lag);
      Eigen::VectorXd r(lag), phi;
      yule_walker_lag_block(rho, m, lag, R, r);
      if (!solve_checked(R, r, phi)) break;
      if (std::abs(phi(lag - 1)) > threshold) chosen = lag;
    }
    orders[m - 1] = chosen;
  }
  return orders;
}

PeriodicModel fit_periodic(const MonthlySeries& series, const MonthlyOrders& orders, ModelKind kind,
                           const FitOptions& options) {
  const bool annual = kind == ModelKind::kParpA;
  const bool use_psi = annual && !options.fix_psi_zero;
  const bool least_squares = options.method == EstimationMethod::kLeastSquares;
  if (!(options.recent_weight > 0.0) || !std::isfinite(options.recent_weight)) {
    fail(ErrorCode::kInvalidArgument, "row weight must be positive and finite");
  }
  if (options.recent_weight != 1.0 && !least_squares) {
    fail(ErrorCode::kInvalidArgument, "row weighting requires least-squares estimation");
  }
  for (int m = 0; m < kMonths; ++m) {
    if (orders[m] < 1 || static_cast<std::size_t>(orders[m]) >= series.size()) {
      fail(ErrorCode::kInvalidArgument, "invalid order " + std::to_string(orders[m]) + " for " + month_label(m + 1));
    }
  }

  PeriodicModel model;
  model.kind = kind;
  model.orders = orders;
  model.fit_start = series.start();
  model.fit_end = series.end();
  model.stats = periodic_stats(series);
  const std::vector<double> z = normalize(series, model.stats);
  const std::size_t n = series.size();
  const YearMonth start = series.start();

  std::vector<double> a;  // normalized trailing average, NaN before the first full window
  std::size_t window = 0;
  if (annual) {
    model.annual = annual_stats(series);
    window = static_cast<std::size_t>(model.annual->window);
    a.assign(n, kNaN);
    for (std::size_t i = window; i < n; ++i) {
      int m = series.month_of(i) - 1;
      if (!(model.annual->a_std[m] > 0.0)) {
        fail(ErrorCode::kDegenerateMonth, "trailing average of " + month_label(m + 1) + " has zero spread");
      }
      a[i] = (model.annual->a_series[i] - model.annual->a_mean[m]) / model.annual->a_std[m];
    }
  }

  const int max_order = *std::max_element(orders.begin(), orders.end());
  std::optional<AutocorrelationTable> rho;
  if (!least_squares) rho.emplace(z, start, max_order);

  model.residuals.assign(n, kNaN);
  const std::size_t recent_from = n > static_cast<std::size_t>(options.recent_months)
                                      ? n - static_cast<std::size_t>(options.recent_months)
                                      : 0;

  for (int m = 1; m <= kMonths; ++m) {
    const int p = orders[m - 1];
    const int params = p + (use_psi ? 1 : 0);
    std::vector<std::size_t> rows;
    std::size_t first = std::max({options.first_row, static_cast<std::size_t>(p), window});
    for (std::size_t i = first; i < n; ++i) {
      if (month_at(start, i) == m) rows.push_back(i);
    }
    if (rows.size() < static_cast<std::size_t>(params + 2)) {
      fail(ErrorCode::kInsufficientData, month_label(m) + " has " + std::to_string(rows.size()) +
                                             " regression rows, needs " + std::to_string(params + 2));
    }

    auto regressor = [&](std::size_t i, int col) { return col < p ? z[i - 1 - col] : a[i]; };

    Eigen::VectorXd beta;
    if (least_squares) {
      Eigen::MatrixXd X(rows.size(), params);
      Eigen::VectorXd y(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        double sw = rows[r] >= recent_from ? std::sqrt(options.recent_weight) : 1.0;
        for (int c = 0; c < params; ++c) X(r, c) = sw * regressor(rows[r], c);
        y(r) = sw * z[rows[r]];
      }
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
      qr.setThreshold(1e-10);
      if (qr.rank() < params) {
        fail(ErrorCode::kSingularSystem, "least-squares design for " + month_label(m) + " is rank deficient");
      }
      beta = qr.solve(y);
    } else {
      Eigen::MatrixXd G(params, params);
      Eigen::VectorXd g(params);
      Eigen::MatrixXd R(p, p);
      Eigen::VectorXd r(p);
      yule_walker_lag_block(*rho, m, p, R, r);
      G.topLeftCorner(p, p) = R;
      g.head(p) = r;
      if (use_psi) {
        auto a_at = [&](std::size_t i) { return a[i]; };
        auto z_at = [&](std::size_t i) { return z[i]; };
        for (int i = 1; i <= p; ++i) {
          double c = paired_moment(n, start, m, i, window, a_at, z_at);
          G(p, i - 1) = c;
          G(i - 1, p) = c;
        }
        G(p, p) = 1.0;
        g(p) = paired_moment(n, start, m, 0, window, a_at, z_at);
      }
      if (!solve_checked(G, g, beta)) {
        fail(ErrorCode::kSingularSystem, "Yule-Walker system for " + month_label(m) + " is singular");
      }
    }

    model.phi[m - 1].assign(beta.data(), beta.data() + p);
    model.psi[m - 1] = use_psi ? beta(p) : 0.0;

    double sum = 0.0;
    for (std::size_t i : rows) {
      double fitted = 0.0;
      for (int c = 0; c < params; ++c) fitted += beta(c) * regressor(i, c);
      model.residuals[i] = z[i] - fitted;
      sum += model.residuals[i];
    }
    double mean = sum / rows.size();
    double ss = 0.0;
    for (std::size_t i : rows) ss += (model.residuals[i] - mean) * (model.residuals[i] - mean);
    model.resid_std[m - 1] = std::sqrt(ss / (rows.size() - 1));
  }
  return model;
}

double conditional_mean_normalized(const PeriodicModel& model, std::span<const double> past, int target_month) {
  if (past.size() < model.required_history()) {
    fail(ErrorCode::kInsufficientData, "recursion needs " + std::to_string(model.required_history()) +
                                           " past values, got " + std::to_string(past.size()));
  }
  const std::size_t n = past.size();
  const int m = target_month - 1;
  double value = 0.0;
  for (int i = 1; i <= model.orders[m]; ++i) {
    int lm = month_back(target_month, i) - 1;
    if (!(model.stats.std[lm] > 0.0)) {
      fail(ErrorCode::kDegenerateMonth, month_label(lm + 1) + " has zero standard deviation");
    }
    value += model.phi[m][i - 1] * (past[n - i] - model.stats.mean[lm]) / model.stats.std[lm];
  }
  if (model.has_annual() && model.psi[m] != 0.0) {
    const AnnualStats& an = *model.annual;
    double avg = trailing_mean(past, n, an.window);
    value += model.psi[m] * (avg - an.a_mean[m]) / an.a_std[m];
  }
  return value;
}

std::vector<double> point_forecast(const PeriodicModel& model, const MonthlySeries& history, int horizon) {
  if (horizon < 1) fail(ErrorCode::kInvalidArgument, "forecast horizon must be at least 1");
  std::vector<double> path(history.values().begin(), history.values().end());
  path.reserve(path.size() + horizon);
  const YearMonth origin = history.end();
  for (int k = 1; k <= horizon; ++k) {
    int month = (origin + k).month;
    double zhat = conditional_mean_normalized(model, path, month);
    path.push_back(model.stats.mean[month - 1] + model.stats.std[month - 1] * zhat);
  }
  return {path.end() - horizon, path.end()};
}

}  // namespace parpmon
