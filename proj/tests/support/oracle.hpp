// Brute-force reference implementations of the bias metrics, written straight
// from the formulas with no shared code and no shortcuts.
#pragma once

#include <cmath>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// gamma(h) = (1/n) sum_{t} (x_t - xbar)(x_{t+|h|} - xbar)
inline double autocov(const std::vector<double>& x, int h) {
  const int n = static_cast<int>(x.size());
  const double xbar = mean(x);
  h = std::abs(h);
  double s = 0.0;
  for (int t = 0; t + h < n; ++t) s += (x[t] - xbar) * (x[t + h] - xbar);
  return s / n;
}

/// v = sum over integer h with |h| < sqrt(n) of (1 - |h|/sqrt(n)) gamma(h),
/// summed over negative and positive h separately.
inline double bartlett(const std::vector<double>& x, bool* fallback = nullptr) {
  const int n = static_cast<int>(x.size());
  const double r = std::sqrt(static_cast<double>(n));
  double v = 0.0;
  for (int h = -n; h <= n; ++h) {
    if (std::abs(h) < r) v += (1.0 - std::abs(h) / r) * autocov(x, h);
  }
  if (fallback) *fallback = v < 0.0;
  return v < 0.0 ? autocov(x, 0) : v;
}

struct Interval {
  double low, high;
};

inline Interval ci(const std::vector<double>& x, double z = 1.96) {
  const double c = mean(x);
  const double half = z * std::sqrt(bartlett(x) / static_cast<double>(x.size()));
  return {c - half, c + half};
}

/// Rows are origins, columns horizons; only rows with all K entries count.
inline double cumulative(const std::vector<std::vector<double>>& errors, int K) {
  double total = 0.0;
  int rows = 0;
  for (const auto& row : errors) {
    if (static_cast<int>(row.size()) < K) continue;
    double s = 0.0;
    for (int k = 0; k < K; ++k) s += row[k];
    total += s;
    ++rows;
  }
  return total / rows;
}

inline double pct_ratio_of_means(const std::vector<double>& err, const std::vector<double>& obs) {
  return 100.0 * mean(err) / mean(obs);
}

inline double pct_mean_of_ratios(const std::vector<double>& err, const std::vector<double>& obs) {
  double s = 0.0;
  for (std::size_t i = 0; i < err.size(); ++i) s += err[i] / obs[i];
  return 100.0 * s / static_cast<double>(err.size());
}

/// Spearman rank correlation (no ties expected).
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (v[j] < v[i]) ++less;
        if (v[j] == v[i]) ++equal;
      }
      r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = mean(ra), mb = mean(rb);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace oracle
