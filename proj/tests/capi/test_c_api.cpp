// Uses nothing but the public C header and the shared library.
#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "parpmon/parpmon.h"

namespace fs = std::filesystem;

namespace {

std::vector<double> par1_values(int years, double phi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  const double pi = std::acos(-1.0);
  std::vector<double> v;
  double z = 0.0;
  for (int t = -120; t < years * 12; ++t) {
    z = phi * z + std::sqrt(1.0 - phi * phi) * n(rng);
    if (t < 0) continue;
    const double mu = 1000.0 * (1.0 + 0.5 * std::sin(2.0 * pi * (t % 12) / 12.0));
    v.push_back(mu + 0.2 * mu * z);
  }
  return v;
}

struct Series {
  parpmon_series* p = nullptr;
  ~Series() { parpmon_series_free(p); }
};
struct Model {
  parpmon_model* p = nullptr;
  ~Model() { parpmon_model_free(p); }
};

}  // namespace

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(parpmon_version(), "1.0.0");
  EXPECT_STREQ(parpmon_status_name(PARPMON_OK), "ok");
  EXPECT_TRUE(parpmon_status_is_validation(PARPMON_ERR_GAP));
  EXPECT_FALSE(parpmon_status_is_validation(PARPMON_ERR_SINGULAR_SYSTEM));
}

TEST(CApi, SeriesRoundTripAndErrors) {
  const double values[] = {1.0, 2.0, 3.0};
  Series s;
  ASSERT_EQ(parpmon_series_create(2011, 11, values, 3, "SE", &s.p), PARPMON_OK);
  EXPECT_EQ(parpmon_series_length(s.p), 3u);
  int y = 0, m = 0;
  ASSERT_EQ(parpmon_series_start(s.p, &y, &m), PARPMON_OK);
  EXPECT_EQ(y, 2011);
  EXPECT_EQ(m, 11);
  double back[3];
  ASSERT_EQ(parpmon_series_values(s.p, back, 3), PARPMON_OK);
  EXPECT_EQ(back[2], 3.0);
  EXPECT_EQ(parpmon_series_values(s.p, back, 2), PARPMON_ERR_INVALID_ARGUMENT);

  parpmon_series* bad = nullptr;
  EXPECT_EQ(parpmon_series_create(2011, 13, values, 3, "SE", &bad), PARPMON_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(bad, nullptr);
  EXPECT_GT(std::strlen(parpmon_last_error()), 0u);
  EXPECT_EQ(parpmon_series_create(2011, 1, nullptr, 3, "SE", &bad), PARPMON_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(parpmon_series_load_csv("/nonexistent/x.csv", nullptr, &bad), PARPMON_ERR_IO);
}

TEST(CApi, CsvGapStatus) {
  const fs::path p = fs::temp_directory_path() / "parpmon_capi_gap.csv";
  {
    std::ofstream f(p);
    f << "date,value\n2011-01,100\n2011-03,110\n";
  }
  parpmon_series* s = nullptr;
  EXPECT_EQ(parpmon_series_load_csv(p.c_str(), nullptr, &s), PARPMON_ERR_GAP);
  EXPECT_NE(std::string(parpmon_last_error()).find("2011-02"), std::string::npos);
  fs::remove(p);
}

TEST(CApi, FitForecastSimulate) {
  const auto v = par1_values(400, 0.5, 11);
  Series s;
  ASSERT_EQ(parpmon_series_create(1601, 1, v.data(), v.size(), "SE", &s.p), PARPMON_OK);
  parpmon_fit_options fo;
  parpmon_fit_options_default(&fo);
  fo.kind = PARPMON_MODEL_PARP;
  fo.p_max = 3;
  Model m;
  ASSERT_EQ(parpmon_model_fit(s.p, &fo, &m.p), PARPMON_OK) << parpmon_last_error();
  EXPECT_EQ(parpmon_model_get_kind(m.p), PARPMON_MODEL_PARP);
  int order = 0;
  double phi[12], psi = -1.0, resid = 0.0;
  ASSERT_EQ(parpmon_model_month(m.p, 1, &order, phi, 12, &psi, &resid), PARPMON_OK);
  ASSERT_GE(order, 1);
  EXPECT_NEAR(phi[0], 0.5, 0.1);
  EXPECT_EQ(psi, 0.0);
  EXPECT_EQ(parpmon_model_month(m.p, 13, &order, phi, 12, &psi, &resid), PARPMON_ERR_INVALID_ARGUMENT);

  char* json = nullptr;
  ASSERT_EQ(parpmon_model_to_json(m.p, &json), PARPMON_OK);
  EXPECT_NE(std::string(json).find("\"months\""), std::string::npos) << json;
  parpmon_string_free(json);

  std::vector<double> f(24);
  ASSERT_EQ(parpmon_point_forecast(m.p, s.p, 24, f.data()), PARPMON_OK);
  for (double x : f) EXPECT_TRUE(std::isfinite(x));

  parpmon_simulation_options so;
  parpmon_simulation_options_default(&so);
  so.horizon = 12;
  so.omega_count = 500;
  so.seed = 5;
  const parpmon_model* models[] = {m.p};
  const parpmon_series* hist[] = {s.p};
  parpmon_panel* a = nullptr;
  parpmon_panel* b = nullptr;
  ASSERT_EQ(parpmon_simulate(models, hist, 1, &so, &a), PARPMON_OK) << parpmon_last_error();
  so.threads = 3;
  ASSERT_EQ(parpmon_simulate(models, hist, 1, &so, &b), PARPMON_OK);
  int om = 0, k = 0, n = 0;
  ASSERT_EQ(parpmon_panel_dims(a, &om, &k, &n), PARPMON_OK);
  EXPECT_EQ(om, 500);
  EXPECT_EQ(k, 12);
  EXPECT_EQ(n, 1);
  double x = 0.0, y = 0.0;
  ASSERT_EQ(parpmon_panel_value(a, 499, 12, 0, &x), PARPMON_OK);
  ASSERT_EQ(parpmon_panel_value(b, 499, 12, 0, &y), PARPMON_OK);
  EXPECT_EQ(x, y);
  EXPECT_GT(x, 0.0);
  EXPECT_EQ(parpmon_panel_value(a, 500, 1, 0, &x), PARPMON_ERR_INVALID_ARGUMENT);
  std::vector<double> mean(12);
  ASSERT_EQ(parpmon_panel_mean(a, 0, mean.data(), 12), PARPMON_OK);
  // Far ahead, the scenario mean approaches the climatology of the month.
  EXPECT_NEAR(mean[11] / f[11], 1.0, 0.05);
  parpmon_panel_free(a);
  parpmon_panel_free(b);
}

TEST(CApi, InsufficientDataIsRuntimeStatus) {
  const auto v = par1_values(1, 0.5, 1);
  Series s;
  ASSERT_EQ(parpmon_series_create(2000, 1, v.data(), v.size(), "X", &s.p), PARPMON_OK);
  Model m;
  const parpmon_status st = parpmon_model_fit(s.p, nullptr, &m.p);
  EXPECT_EQ(st, PARPMON_ERR_INSUFFICIENT_DATA);
  EXPECT_FALSE(parpmon_status_is_validation(st));
}

TEST(CApi, ConfigSetDumpValidate) {
  parpmon_config* c = nullptr;
  ASSERT_EQ(parpmon_config_create(&c), PARPMON_OK);
  EXPECT_EQ(parpmon_config_set(c, "bogus", "1"), PARPMON_ERR_CONFIG);
  EXPECT_EQ(parpmon_config_validate(c), PARPMON_ERR_CONFIG);
  ASSERT_EQ(parpmon_config_set(c, "data.SE", "se.csv"), PARPMON_OK);
  ASSERT_EQ(parpmon_config_set(c, "K", "12"), PARPMON_OK);
  EXPECT_EQ(parpmon_config_validate(c), PARPMON_OK);
  char* dump = nullptr;
  ASSERT_EQ(parpmon_config_dump(c, &dump), PARPMON_OK);
  EXPECT_NE(std::string(dump).find("K = 12"), std::string::npos) << dump;
  parpmon_string_free(dump);
  parpmon_config_free(c);
  EXPECT_EQ(parpmon_render_reports("/nonexistent/dir", 0), PARPMON_ERR_IO);
}
