#include "parpmon/scenario.hpp"

#include <algorithm>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "parpmon/error.hpp"
#include "parpmon/io.hpp"
#include "parpmon/rng.hpp"

namespace parpmon {

double lambda_bound(const PeriodicModel& model, std::span<const double> past, int target_month) {
  const int m = target_month - 1;
  if (!(model.stats.std[m] > 0.0)) {
    fail(ErrorCode::kDegenerateMonth, std::string("month ") + month_name(target_month) + " has zero standard deviation");
  }
  return -model.stats.mean[m] / model.stats.std[m] - conditional_mean_normalized(model, past, target_month);
}

ShiftedLogNormalParams shifted_lognormal_params(double lambda, double resid_std) {
  if (!(resid_std > 0.0) || !std::isfinite(resid_std)) {
    fail(ErrorCode::kInvalidArgument, "residual standard deviation must be positive");
  }
  if (!(lambda < 0.0)) {
    fail(ErrorCode::kPositivityViolation,
         "shift " + format_double(lambda) + " is not negative: conditional mean is not positive");
  }
  ShiftedLogNormalParams p;
  p.lambda = lambda;
  const double ratio = (resid_std / lambda) * (resid_std / lambda);
  p.theta = 1.0 + ratio;
  const double log_theta = std::log1p(ratio);
  p.sigma_xi = std::sqrt(log_theta);
  // 0.5 ln(s^2 / (theta^2 - theta)) rewritten with theta^2 - theta = theta * s^2 / lambda^2,
  // which stays accurate when s << |lambda|.
  p.mu_xi = std::log(-lambda) - 0.5 * log_theta;
  return p;
}

CorrelationSet CorrelationSet::identity(int dimension) {
  CorrelationSet set;
  for (int m = 0; m < kMonths; ++m) {
    set.U[m] = Eigen::MatrixXd::Identity(dimension, dimension);
    set.B[m] = Eigen::MatrixXd::Identity(dimension, dimension);
  }
  return set;
}

ResidualTrack residual_track(const PeriodicModel& model) { return {model.fit_start, model.residuals}; }

double cholesky_with_jitter(const Eigen::MatrixXd& u, Eigen::MatrixXd& factor) {
  const auto n = u.rows();
  double jitter = 0.0;
  while (true) {
    Eigen::LLT<Eigen::MatrixXd> llt(u + jitter * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd l = llt.matrixL();
      if (l.allFinite()) {
        factor = l;
        return jitter;
      }
    }
    jitter = jitter == 0.0 ? 1e-10 : jitter * 10.0;
    if (jitter > 1e-6 * (1.0 + 1e-9)) {
      fail(ErrorCode::kSingularSystem, "correlation matrix is not positive definite even with 1e-6 jitter");
    }
  }
}

CorrelationSet build_correlation(std::span<const ResidualTrack> tracks) {
  if (tracks.empty()) fail(ErrorCode::kInvalidArgument, "no residual tracks");
  const int dim = static_cast<int>(tracks.size());
  CorrelationSet set;
  if (dim == 1) return CorrelationSet::identity(1);

  YearMonth first = tracks[0].start;
  YearMonth last = tracks[0].start + static_cast<int>(tracks[0].values.size()) - 1;
  for (const auto& t : tracks) {
    first = std::max(first, t.start);
    last = std::min(last, t.start + static_cast<int>(t.values.size()) - 1);
  }

  std::array<std::vector<Eigen::VectorXd>, kMonths> samples;
  for (YearMonth when = first; when <= last; when = when + 1) {
    Eigen::VectorXd v(dim);
    bool complete = true;
    for (int s = 0; s < dim; ++s) {
      v(s) = tracks[s].values[static_cast<std::size_t>(when - tracks[s].start)];
      complete = complete && std::isfinite(v(s));
    }
    if (complete) samples[when.month - 1].push_back(v);
  }

  for (int m = 0; m < kMonths; ++m) {
    const auto& obs = samples[m];
    if (obs.size() < 2) {
      fail(ErrorCode::kInsufficientData,
           std::string("fewer than 2 aligned residuals for month ") + month_name(m + 1));
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (const auto& v : obs) mean += v;
    mean /= static_cast<double>(obs.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& v : obs) cov += (v - mean) * (v - mean).transpose();
    Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
    if ((sd.array() <= 0.0).any()) {
      fail(ErrorCode::kDegenerateMonth, std::string("constant residuals in month ") + month_name(m + 1));
    }
    Eigen::MatrixXd u = sd.cwiseInverse().asDiagonal() * cov * sd.cwiseInverse().asDiagonal();
    u.diagonal().setOnes();
    set.U[m] = u;
    set.jitter[m] = cholesky_with_jitter(u, set.B[m]);
  }
  return set;
}

CorrelationSet build_correlation(std::span<const PeriodicModel> models) {
  std::vector<ResidualTrack> tracks;
  tracks.reserve(models.size());
  for (const auto& model : models) tracks.push_back(residual_track(model));
  return build_correlation(tracks);
}

ScenarioPanel::ScenarioPanel(YearMonth origin, const SimulationOptions& options, std::vector<std::string> subsystems)
    : origin_(origin),
      seed_(options.seed),
      omega_count_(options.omega_count),
      horizon_(options.horizon),
      subsystems_(std::move(subsystems)) {
  std::size_t cells = static_cast<std::size_t>(omega_count_) * horizon_ * subsystems_.size();
  values_.assign(cells, 0.0);
  if (options.keep_residuals) residuals_.assign(cells, 0.0);
}

std::vector<double> ScenarioPanel::mean_forecast(int s) const {
  std::vector<double> mean(horizon_, 0.0);
  for (int w = 0; w < omega_count_; ++w) {
    for (int k = 1; k <= horizon_; ++k) mean[k - 1] += value(w, k, s);
  }
  for (double& v : mean) v /= omega_count_;
  return mean;
}

namespace {

void check_inputs(std::span<const PeriodicModel> models, std::span<const MonthlySeries> histories,
                  const CorrelationSet& correlation, const SimulationOptions& options) {
  if (models.empty() || models.size() != histories.size()) {
    fail(ErrorCode::kInvalidArgument, "need one history per model and at least one subsystem");
  }
  if (options.horizon < 1) fail(ErrorCode::kInvalidArgument, "simulation horizon must be at least 1");
  if (options.omega_count < 1) fail(ErrorCode::kInvalidArgument, "scenario count must be at least 1");
  if (options.threads < 1) fail(ErrorCode::kInvalidArgument, "thread count must be at least 1");
  if (correlation.dimension() != static_cast<int>(models.size())) {
    fail(ErrorCode::kInvalidArgument, "correlation dimension does not match the number of subsystems");
  }
  for (std::size_t s = 0; s < models.size(); ++s) {
    const std::string who = histories[s].label().empty() ? "subsystem " + std::to_string(s) : histories[s].label();
    if (histories[s].end() != histories[0].end()) {
      fail(ErrorCode::kInvalidArgument, who + " history ends at " + histories[s].end().str() + ", expected " +
                                            histories[0].end().str());
    }
    if (histories[s].size() < models[s].required_history()) {
      fail(ErrorCode::kInsufficientData, who + " history is shorter than the model's lags");
    }
    for (int m = 0; m < kMonths; ++m) {
      if (!(models[s].resid_std[m] > 0.0)) {
        fail(ErrorCode::kInvalidArgument,
             who + ": residual std of " + month_name(m + 1) + " is zero, shifted log-normal undefined");
      }
    }
  }
}

}  // namespace

ScenarioPanel simulate(std::span<const PeriodicModel> models, std::span<const MonthlySeries> histories,
                       const CorrelationSet& correlation, const SimulationOptions& options) {
  check_inputs(models, histories, correlation, options);
  const int dim = static_cast<int>(models.size());
  std::vector<std::string> names;
  for (const auto& h : histories) names.push_back(h.label());
  const YearMonth origin = histories[0].end();
  ScenarioPanel panel(origin, options, names);

  std::vector<std::size_t> keep(dim);
  for (int s = 0; s < dim; ++s) keep[s] = models[s].required_history();

  auto run_block = [&](int omega_begin, int omega_end) {
    std::vector<std::vector<double>> paths(dim);
    Eigen::VectorXd a(dim), eta(dim);
    for (int w = omega_begin; w < omega_end; ++w) {
      std::mt19937_64 engine(derive_seed(options.seed, {static_cast<std::uint64_t>(w)}));
      std::normal_distribution<double> normal(0.0, 1.0);
      for (int s = 0; s < dim; ++s) {
        auto values = histories[s].values();
        paths[s].assign(values.end() - static_cast<std::ptrdiff_t>(keep[s]), values.end());
        paths[s].reserve(keep[s] + options.horizon);
      }
      for (int k = 1; k <= options.horizon; ++k) {
        const int month = (origin + k).month;
        for (int s = 0; s < dim; ++s) a(s) = normal(engine);
        // Lower-triangular product by hand; Eigen's general kernel dominates at these sizes.
        const Eigen::MatrixXd& factor = correlation.B[month - 1];
        for (int i = 0; i < dim; ++i) {
          double v = 0.0;
          for (int j = 0; j <= i; ++j) v += factor(i, j) * a(j);
          eta(i) = v;
        }
        for (int s = 0; s < dim; ++s) {
          const PeriodicModel& model = models[s];
          ShiftedLogNormalParams p;
          try {
            p = shifted_lognormal_params(lambda_bound(model, paths[s], month), model.resid_std[month - 1]);
          } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " (scenario " + std::to_string(w) + ", step " +
                                      std::to_string(k) + ", subsystem " + names[s] + ")");
          }
          const double growth = std::exp(p.sigma_xi * eta(s) + p.mu_xi);
          // mean + std * (conditional + e) with e = growth + lambda and
          // lambda = -mean/std - conditional collapses to std * growth.
          const double y = model.stats.std[month - 1] * growth;
          if (!(y > 0.0) || !std::isfinite(y)) {
            fail(ErrorCode::kPositivityViolation, "non-positive simulated value (scenario " + std::to_string(w) +
                                                      ", step " + std::to_string(k) + ", subsystem " + names[s] + ")");
          }
          paths[s].push_back(y);
          panel.value(w, k, s) = y;
          if (panel.has_residuals()) panel.residual(w, k, s) = growth + p.lambda;
        }
      }
    }
  };

  const int threads = std::min(options.threads, options.omega_count);
  if (threads == 1) {
    run_block(0, options.omega_count);
    return panel;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const int per = (options.omega_count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int begin = t * per;
      const int end = std::min(options.omega_count, begin + per);
      pool.emplace_back([&, t, begin, end] {
        try {
          run_block(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  // Lowest block first so the reported failure does not depend on timing.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return panel;
}

void write_panel_csv(const ScenarioPanel& panel, std::ostream& out) {
  out << "omega,k,subsystem,value\n";
  for (int w = 0; w < panel.omega_count(); ++w) {
    for (int k = 1; k <= panel.horizon(); ++k) {
      for (int s = 0; s < panel.subsystem_count(); ++s) {
        out << w << ',' << k << ',' << panel.subsystems()[s] << ',' << format_double(panel.value(w, k, s)) << '\n';
      }
    }
  }
}

}  // namespace parpmon
