#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "panels.hpp"
#include "parpmon/benchmarks.hpp"
#include "parpmon/bias.hpp"
#include "parpmon/error.hpp"
#include "synthetic.hpp"

using namespace parpmon;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kIo;
}

MonthlySeries monthly_through(YearMonth start, YearMonth end, std::uint64_t seed) {
  return synth::generate(synth::par1(0.5), start, static_cast<std::size_t>(end - start + 1), seed);
}

}  // namespace

TEST(Bias, ArithmeticMean) {
  auto p = panels::from_errors({{1.0}, {2.0}, {3.0}}, 1);
  EXPECT_DOUBLE_EQ(bias(p, 1), 2.0);
  auto z = panels::from_errors({{0.0, 0.0}, {0.0, 0.0}}, 2);
  EXPECT_DOUBLE_EQ(bias(z, 1), 0.0);
  EXPECT_DOUBLE_EQ(bias(z, 2), 0.0);
  EXPECT_EQ(code_of([&] { bias(z, 3); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { bias(z, 0); }), ErrorCode::kInvalidArgument);
}

TEST(BiasCi, ConstantErrorsGiveZeroWidth) {
  auto p = panels::from_errors({{2.5}, {2.5}, {2.5}, {2.5}, {2.5}}, 1);
  auto ci = bias_ci(p, 1);
  EXPECT_NEAR(ci.low, 2.5, 1e-12);
  EXPECT_NEAR(ci.high, 2.5, 1e-12);
}

TEST(BiasCi, AlternatingSixPointPanel) {
  std::vector<double> e{1, -1, 1, -1, 1, -1};
  std::vector<std::vector<double>> rows;
  for (double v : e) rows.push_back({v});
  auto p = panels::from_errors(rows, 1);
  bool fell_back = false;
  const double v = bartlett_variance(p.errors_at(1), &fell_back);
  bool oracle_fell_back = false;
  EXPECT_NEAR(v, oracle::bartlett(e, &oracle_fell_back), 1e-12);
  EXPECT_EQ(fell_back, oracle_fell_back);
  // By hand: gamma = 1, -5/6, 4/6 at h = 0, 1, 2; cutoff floor(sqrt 6) = 2.
  const double r = std::sqrt(6.0);
  const double hand = 1.0 + 2.0 * ((1 - 1 / r) * (-5.0 / 6.0) + (1 - 2 / r) * (4.0 / 6.0));
  EXPECT_NEAR(hand < 0 ? 1.0 : hand, v, 1e-12);
  auto ci = bias_ci(p, 1);
  auto o = oracle::ci(e);
  EXPECT_NEAR(ci.low, o.low, 1e-12);
  EXPECT_NEAR(ci.high, o.high, 1e-12);
}

TEST(BiasCi, IidWidthMatchesClassicalInterval) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> N(0.0, 2.0);
  std::vector<std::vector<double>> rows;
  std::vector<double> e;
  for (int i = 0; i < 20000; ++i) {
    e.push_back(N(rng));
    rows.push_back({e.back()});
  }
  auto ci = bias_ci(panels::from_errors(rows, 1), 1);
  const double m = oracle::mean(e);
  double ss = 0;
  for (double x : e) ss += (x - m) * (x - m);
  const double s = std::sqrt(ss / (e.size() - 1));
  const double classical = 2 * 1.96 * s / std::sqrt(static_cast<double>(e.size()));
  EXPECT_NEAR((ci.high - ci.low) / classical, 1.0, 0.10);
}

TEST(BiasCi, NeedsFourErrors) {
  auto p = panels::from_errors({{1.0}, {2.0}, {3.0}}, 1);
  EXPECT_EQ(code_of([&] { bias_ci(p, 1); }), ErrorCode::kInsufficientData);
}

// With the 1/n autocovariance the triangular weights give a nonnegative sum,
// so the gamma(0) fallback stays dormant on real sequences.
TEST(BiasCi, BartlettSumIsNonNegative) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> N;
  for (int rep = 0; rep < 500; ++rep) {
    const int n = 4 + static_cast<int>(rng() % 60);
    std::vector<double> e(n);
    double c = 0.0;
    for (auto& x : e) x = c = -0.9 * c + N(rng);
    bool fb = true, ofb = true;
    const double v = bartlett_variance(e, &fb);
    EXPECT_NEAR(v, oracle::bartlett(e, &ofb), 1e-12 * std::max(1.0, v));
    EXPECT_GE(v, 0.0);
    EXPECT_FALSE(fb);
    EXPECT_FALSE(ofb);
  }
}

TEST(CumulativeBias, Linearity) {
  const double c = 1.75;
  std::vector<std::vector<double>> rows(10, std::vector<double>(6, c));
  rows.push_back({c, c});  // incomplete origin is excluded
  auto p = panels::from_errors(rows, 6);
  EXPECT_NEAR(cumulative_bias(p, 6), 6 * c, 1e-12);
  EXPECT_EQ(cumulative_errors(p, 6).size(), 10u);
}

TEST(CumulativeBias, NoCompleteOrigin) {
  auto p = panels::from_errors({{1.0}, {1.0}}, 3);
  EXPECT_EQ(code_of([&] { cumulative_bias(p, 3); }), ErrorCode::kInsufficientData);
}

TEST(CumulativeBias, PerOriginSumIdentity) {
  std::mt19937_64 rng(12);
  auto p = panels::random_panel(rng, 60, 24);
  auto c = cumulative_errors(p, 24);
  std::size_t j = 0;
  for (std::size_t r = 0; r < p.origins.size(); ++r) {
    if (p.forecasts[r].size() < 24) continue;
    double s = 0.0;
    for (int k = 1; k <= 24; ++k) s += p.error(r, k);
    EXPECT_EQ(c[j++], s);
  }
  EXPECT_EQ(j, c.size());
}

TEST(PctBias, RatioOfMeans) {
  auto p = panels::from_errors({{10.0}, {10.0}, {10.0}}, 1, 100.0);
  EXPECT_NEAR(pct_bias(p, 1), 10.0, 1e-12);
  auto z = panels::from_errors({{0.0}, {0.0}}, 1, 100.0);
  EXPECT_DOUBLE_EQ(pct_bias(z, 1), 0.0);
  // Ratio of means differs from mean of ratios when observations vary.
  auto v = panels::from_errors({{10.0}, {10.0}}, {{50.0}, {150.0}}, 1);
  EXPECT_NEAR(pct_bias(v, 1, PctBiasMode::kRatioOfMeans), 10.0, 1e-12);
  EXPECT_NEAR(pct_bias(v, 1, PctBiasMode::kMeanOfRatios), 100.0 * (0.2 + 10.0 / 150.0) / 2.0, 1e-12);
}

TEST(PctBias, AgainstObservedSeries) {
  auto s = monthly_through({2000, 1}, {2005, 12}, 3);
  auto pf = make_perfect_foresight(s);
  auto p = rolling_backtest(s, *pf, {{2003, 1}, {2005, 12}}, {.horizon = 6});
  EXPECT_DOUBLE_EQ(pct_bias(p, s, 3), 0.0);
  EXPECT_DOUBLE_EQ(pct_bias(p, 3), 0.0);
}

TEST(MetricOracle, RandomPanelsMatchBruteForce) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const int K = 1 + static_cast<int>(rng() % 24);
    const int rows = K + 4 + static_cast<int>(rng() % 150);
    auto p = panels::random_panel(rng, rows, K);
    for (int k = 1; k <= K; ++k) {
      std::vector<double> e, o;
      for (std::size_t r = 0; r < p.origins.size(); ++r) {
        if (p.forecasts[r].size() >= static_cast<std::size_t>(k)) {
          e.push_back(p.forecasts[r][k - 1] - p.observed[r][k - 1]);
          o.push_back(p.observed[r][k - 1]);
        }
      }
      auto tol = [](double x) { return 1e-12 * std::max(1.0, std::abs(x)); };
      EXPECT_NEAR(bias(p, k), oracle::mean(e), tol(oracle::mean(e)));
      if (e.size() >= 4) {
        auto ci = bias_ci(p, k);
        auto oc = oracle::ci(e);
        EXPECT_NEAR(ci.low, oc.low, tol(oc.low));
        EXPECT_NEAR(ci.high, oc.high, tol(oc.high));
      }
      EXPECT_NEAR(pct_bias(p, k), oracle::pct_ratio_of_means(e, o), tol(oracle::pct_ratio_of_means(e, o)));
      EXPECT_NEAR(pct_bias(p, k, PctBiasMode::kMeanOfRatios), oracle::pct_mean_of_ratios(e, o),
                  tol(oracle::pct_mean_of_ratios(e, o)));
    }
    std::vector<std::vector<double>> err;
    for (std::size_t r = 0; r < p.origins.size(); ++r) {
      std::vector<double> row;
      for (int k = 1; k <= static_cast<int>(p.forecasts[r].size()); ++k) row.push_back(p.error(r, k));
      err.push_back(row);
    }
    const double oc = oracle::cumulative(err, K);
    EXPECT_NEAR(cumulative_bias(p, K), oc, 1e-12 * std::max(1.0, std::abs(oc)));
  }
}

TEST(RollingBacktest, CaseStudySpanCounts) {
  auto s = monthly_through({1931, 1}, {2024, 9}, 4);
  auto pf = make_perfect_foresight(s);
  // Forecasts issued Jan-2011..Sep-2024: origins Dec-2010..Aug-2024.
  auto p = rolling_backtest(s, *pf, {{2011, 1}, {2024, 9}}, {.horizon = 24});
  auto n = p.counts();
  EXPECT_EQ(p.origins.front(), (YearMonth{2010, 12}));
  EXPECT_EQ(p.origins.back(), (YearMonth{2024, 8}));
  EXPECT_EQ(n[0], 165);
  EXPECT_EQ(n[23], 142);
  for (int k = 1; k <= 24; ++k) EXPECT_EQ(n[k - 1], n[0] - (k - 1));
  // The span that yields the published counts.
  auto q = rolling_backtest(s, *pf, {{2012, 2}, {2024, 9}}, {.horizon = 24});
  EXPECT_EQ(q.counts()[0], 152);
  EXPECT_EQ(q.counts()[1], 151);
  EXPECT_EQ(q.counts()[23], 129);
}

TEST(RollingBacktest, PerfectForesightHasZeroErrors) {
  auto s = monthly_through({1990, 1}, {2010, 12}, 5);
  auto p = rolling_backtest(s, *make_perfect_foresight(s), {{2005, 1}, {2010, 12}}, {.horizon = 12});
  for (int k = 1; k <= 12; ++k) {
    for (double e : p.errors_at(k)) EXPECT_EQ(e, 0.0);
  }
}

TEST(RollingBacktest, SeasonalNaiveExactOnPeriodicData) {
  std::vector<double> v;
  for (int i = 0; i < 240; ++i) v.push_back(500.0 + 30.0 * std::cos(i * M_PI / 6.0) + ((i % 12) == 7 ? 99.0 : 0.0));
  MonthlySeries s({1990, 1}, v);
  auto f = make_forecaster(ForecasterSpec::parse("seasonal_naive"), {});
  auto p = rolling_backtest(s, *f, {{2000, 1}, {2009, 12}}, {.horizon = 24});
  for (int k = 1; k <= 24; ++k) {
    for (double e : p.errors_at(k)) EXPECT_NEAR(e, 0.0, 1e-9);
    EXPECT_NEAR(bias(p, k), 0.0, 1e-9);
  }
}

TEST(RollingBacktest, NoLeakage) {
  auto s = monthly_through({1970, 1}, {2005, 12}, 6);
  EstimationSettings st;
  st.omega_count = 40;
  auto f = make_forecaster(ForecasterSpec::parse("official_parpa"), st);
  const YearMonth origin{2001, 6};
  auto base = f->forecast(s.prefix(origin), 12, origin_seed(1, origin));
  // Perturb every observation after the origin.
  std::vector<double> v(s.values().begin(), s.values().end());
  for (std::size_t i = s.index_of(origin) + 1; i < v.size(); ++i) v[i] *= 1.7;
  MonthlySeries mutated = s.with_values(v);
  auto pa = rolling_backtest(s, *f, {{2001, 7}, {2001, 7}}, {.horizon = 12, .seed = 1});
  auto pb = rolling_backtest(mutated, *f, {{2001, 7}, {2001, 7}}, {.horizon = 12, .seed = 1});
  ASSERT_EQ(pa.forecasts.size(), 1u);
  EXPECT_EQ(pa.forecasts[0], pb.forecasts[0]);
  EXPECT_EQ(pa.forecasts[0][0], base[0]);
}

TEST(RollingBacktest, DeterministicAcrossThreads) {
  auto s = monthly_through({1970, 1}, {2000, 12}, 7);
  EstimationSettings st;
  st.omega_count = 30;
  auto f = make_forecaster(ForecasterSpec::parse("official_parpa"), st);
  auto a = rolling_backtest(s, *f, {{1998, 1}, {2000, 12}}, {.horizon = 6, .seed = 5, .threads = 1});
  auto b = rolling_backtest(s, *f, {{1998, 1}, {2000, 12}}, {.horizon = 6, .seed = 5, .threads = 3});
  EXPECT_EQ(a.origins, b.origins);
  EXPECT_EQ(a.forecasts, b.forecasts);
}

TEST(RollingBacktest, FailedOriginsAreLoggedAndSkipped) {
  // A 14-month prefix supports seasonal naive but not a PARp-A fit.
  auto s = monthly_through({2000, 1}, {2003, 12}, 8);
  EstimationSettings st;
  st.functional = ForecastFunctional::kDeterministic;
  auto f = make_forecaster(ForecasterSpec::parse("official_parpa"), st);
  auto p = rolling_backtest(s, *f, {{2001, 3}, {2003, 12}}, {.horizon = 3});
  ASSERT_FALSE(p.log.empty());
  EXPECT_FALSE(p.log.front().ok);
  EXPECT_FALSE(p.log.front().message.empty());
  EXPECT_LT(p.origins.size(), p.log.size());
  auto report = make_report(p);
  bool mentioned = false;
  for (const auto& w : report.warnings) mentioned |= w.find("skipped") != std::string::npos;
  EXPECT_TRUE(mentioned);
}

TEST(RollingBacktest, InvalidSpans) {
  auto s = monthly_through({2000, 1}, {2003, 12}, 9);
  auto pf = make_perfect_foresight(s);
  EXPECT_EQ(code_of([&] { rolling_backtest(s, *pf, {{2003, 5}, {2003, 1}}, {}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { rolling_backtest(s, *pf, {{2005, 1}, {2006, 1}}, {}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { rolling_backtest(s, *pf, {{2000, 1}, {2003, 1}}, {}); }), ErrorCode::kInsufficientData);
}

TEST(Report, RowsAndInvariants) {
  std::mt19937_64 rng(77);
  auto p = panels::random_panel(rng, 80, 12);
  auto r = make_report(p);
  ASSERT_EQ(r.rows.size(), 12u);
  for (const auto& row : r.rows) {
    EXPECT_LE(row.ci_low, row.bias);
    EXPECT_LE(row.bias, row.ci_high);
    EXPECT_EQ(row.n, 80 - (row.k - 1));
  }
  EXPECT_NEAR(r.cumulative_bias, cumulative_bias(p, 12), 0.0);
  EXPECT_EQ(r.cumulative_count, 80 - 11);
}
