#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "parpmon/parp.hpp"

namespace parpmon {

/// Residual e = exp(xi) + lambda with xi ~ N(mu_xi, sigma_xi^2), moment-matched
/// to zero mean and a given standard deviation.
struct ShiftedLogNormalParams {
  double lambda = 0.0;
  double theta = 1.0;
  double mu_xi = 0.0;
  double sigma_xi = 0.0;
};

/// Infimum of residual values that keep the next value positive:
///   -mean_m / std_m - (deterministic normalized recursion)
/// `past` ends right before the target period. Throws kDegenerateMonth when
/// the target month has zero std.
double lambda_bound(const PeriodicModel& model, std::span<const double> past, int target_month);

/// theta = 1 + s^2 / lambda^2, sigma_xi^2 = ln(theta),
/// mu_xi = 0.5 ln(s^2 / (theta^2 - theta)).
/// Throws kPositivityViolation for lambda >= 0 and kInvalidArgument for s <= 0.
ShiftedLogNormalParams shifted_lognormal_params(double lambda, double resid_std);

inline double sample_residual(const ShiftedLogNormalParams& p, double standard_normal) {
  return std::exp(p.sigma_xi * standard_normal + p.mu_xi) + p.lambda;
}

/// Per-month cross-subsystem residual correlation and its Cholesky factor.
struct CorrelationSet {
  std::array<Eigen::MatrixXd, kMonths> U;
  std::array<Eigen::MatrixXd, kMonths> B;
  /// Diagonal jitter that was needed to factor U (0 when none).
  MonthlyArray jitter{};

  int dimension() const { return static_cast<int>(U[0].rows()); }
  static CorrelationSet identity(int dimension);
};

/// Calendar-anchored residual sequence; NaN marks periods without a residual.
struct ResidualTrack {
  YearMonth start;
  std::vector<double> values;
};

ResidualTrack residual_track(const PeriodicModel& model);

/// Sample correlation of residuals on their common calendar support, per
/// month. Non-positive-definite matrices get jitter 1e-10 * I, escalated by
/// 10x up to 1e-6 before failing with kSingularSystem.
CorrelationSet build_correlation(std::span<const ResidualTrack> tracks);
CorrelationSet build_correlation(std::span<const PeriodicModel> models);

/// Lower Cholesky factor with the jitter escalation above; returns the jitter used.
double cholesky_with_jitter(const Eigen::MatrixXd& u, Eigen::MatrixXd& factor);

struct SimulationOptions {
  int horizon = 60;
  int omega_count = 2000;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Also store the sampled residuals e (same layout as the values).
  bool keep_residuals = false;
};

/// omega x horizon x subsystem block of simulated values. Step k is 1-based:
/// k = 1 is the period right after the origin.
class ScenarioPanel {
 public:
  ScenarioPanel(YearMonth origin, const SimulationOptions& options, std::vector<std::string> subsystems);

  YearMonth origin() const { return origin_; }
  std::uint64_t seed() const { return seed_; }
  int omega_count() const { return omega_count_; }
  int horizon() const { return horizon_; }
  int subsystem_count() const { return static_cast<int>(subsystems_.size()); }
  const std::vector<std::string>& subsystems() const { return subsystems_; }

  double value(int omega, int k, int s) const { return values_[offset(omega, k, s)]; }
  double& value(int omega, int k, int s) { return values_[offset(omega, k, s)]; }
  std::span<const double> values() const { return values_; }

  bool has_residuals() const { return !residuals_.empty(); }
  double residual(int omega, int k, int s) const { return residuals_[offset(omega, k, s)]; }
  double& residual(int omega, int k, int s) { return residuals_[offset(omega, k, s)]; }

  /// Scenario-mean point forecast of subsystem s for k = 1..horizon.
  std::vector<double> mean_forecast(int s) const;

 private:
  std::size_t offset(int omega, int k, int s) const {
    return (static_cast<std::size_t>(omega) * horizon_ + (k - 1)) * subsystems_.size() + s;
  }

  YearMonth origin_;
  std::uint64_t seed_;
  int omega_count_;
  int horizon_;
  std::vector<std::string> subsystems_;
  std::vector<double> values_;
  std::vector<double> residuals_;
};

/// Joint scenario generation. All histories must end at the same month (the
/// origin). Each scenario draws from its own stream keyed by (seed, omega),
/// so the panel does not depend on the thread count.
ScenarioPanel simulate(std::span<const PeriodicModel> models, std::span<const MonthlySeries> histories,
                       const CorrelationSet& correlation, const SimulationOptions& options);

/// Long format: omega,k,subsystem,value with a header row.
void write_panel_csv(const ScenarioPanel& panel, std::ostream& out);

}  // namespace parpmon
