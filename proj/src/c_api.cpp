#include "parpmon/parpmon.h"

#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "parpmon/benchmarks.hpp"
#include "parpmon/config.hpp"
#include "parpmon/error.hpp"
#include "parpmon/io.hpp"
#include "parpmon/parp.hpp"
#include "parpmon/run.hpp"
#include "parpmon/scenario.hpp"

struct parpmon_series {
  parpmon::MonthlySeries value;
};
struct parpmon_model {
  parpmon::PeriodicModel value;
};
struct parpmon_panel {
  parpmon::ScenarioPanel value;
};
struct parpmon_config {
  parpmon::RunConfig value;
};

namespace {

thread_local std::string g_last_error;

parpmon_status to_status(parpmon::ErrorCode code) {
  using parpmon::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return PARPMON_ERR_INVALID_ARGUMENT;
    case ErrorCode::kInsufficientData: return PARPMON_ERR_INSUFFICIENT_DATA;
    case ErrorCode::kDegenerateMonth: return PARPMON_ERR_DEGENERATE_MONTH;
    case ErrorCode::kSingularSystem: return PARPMON_ERR_SINGULAR_SYSTEM;
    case ErrorCode::kPositivityViolation: return PARPMON_ERR_POSITIVITY;
    case ErrorCode::kParse: return PARPMON_ERR_PARSE;
    case ErrorCode::kGap: return PARPMON_ERR_GAP;
    case ErrorCode::kValidation: return PARPMON_ERR_VALIDATION;
    case ErrorCode::kConfig: return PARPMON_ERR_CONFIG;
    case ErrorCode::kIo: return PARPMON_ERR_IO;
  }
  return PARPMON_ERR_INTERNAL;
}

parpmon_status set_error(parpmon_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating every exception into a status + last-error message.
template <class Body>
parpmon_status guarded(Body&& body) {
  try {
    g_last_error.clear();
    body();
    return PARPMON_OK;
  } catch (const parpmon::Error& e) {
    return set_error(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PARPMON_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PARPMON_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(PARPMON_ERR_INTERNAL, "unknown failure");
  }
}

#define PARPMON_REQUIRE(cond, what) \
  do {                              \
    if (!(cond)) return set_error(PARPMON_ERR_INVALID_ARGUMENT, what); \
  } while (0)

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* parpmon_version(void) { return "1.0.0"; }

const char* parpmon_last_error(void) { return g_last_error.c_str(); }

const char* parpmon_status_name(parpmon_status status) {
  switch (status) {
    case PARPMON_OK: return "ok";
    case PARPMON_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PARPMON_ERR_INSUFFICIENT_DATA: return "insufficient data";
    case PARPMON_ERR_DEGENERATE_MONTH: return "degenerate month";
    case PARPMON_ERR_SINGULAR_SYSTEM: return "singular system";
    case PARPMON_ERR_POSITIVITY: return "positivity violation";
    case PARPMON_ERR_PARSE: return "parse error";
    case PARPMON_ERR_GAP: return "gap in monthly data";
    case PARPMON_ERR_VALIDATION: return "validation error";
    case PARPMON_ERR_CONFIG: return "configuration error";
    case PARPMON_ERR_IO: return "i/o error";
    case PARPMON_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

int parpmon_status_is_validation(parpmon_status status) {
  switch (status) {
    case PARPMON_ERR_INVALID_ARGUMENT:
    case PARPMON_ERR_PARSE:
    case PARPMON_ERR_GAP:
    case PARPMON_ERR_VALIDATION:
    case PARPMON_ERR_CONFIG:
    case PARPMON_ERR_IO:
      return 1;
    default:
      return 0;
  }
}

void parpmon_string_free(char* text) { std::free(text); }

parpmon_status parpmon_series_create(int start_year, int start_month, const double* values, size_t count,
                                     const char* label, parpmon_series** out) {
  PARPMON_REQUIRE(out, "out is null");
  PARPMON_REQUIRE(values || count == 0, "values is null");
  *out = nullptr;
  return guarded([&] {
    parpmon::MonthlySeries s({start_year, start_month}, std::vector<double>(values, values + count),
                             label ? label : "");
    *out = new parpmon_series{std::move(s)};
  });
}

parpmon_status parpmon_series_load_csv(const char* path, const char* subsystem, parpmon_series** out) {
  PARPMON_REQUIRE(path && out, "path and out are required");
  *out = nullptr;
  return guarded([&] {
    std::optional<std::string> filter;
    if (subsystem) filter = subsystem;
    *out = new parpmon_series{parpmon::ingest_csv(path, {}, filter)};
  });
}

void parpmon_series_free(parpmon_series* series) { delete series; }

size_t parpmon_series_length(const parpmon_series* series) { return series ? series->value.size() : 0; }

parpmon_status parpmon_series_start(const parpmon_series* series, int* year, int* month) {
  PARPMON_REQUIRE(series && year && month, "null argument");
  *year = series->value.start().year;
  *month = series->value.start().month;
  return PARPMON_OK;
}

parpmon_status parpmon_series_values(const parpmon_series* series, double* out, size_t capacity) {
  PARPMON_REQUIRE(series && out, "null argument");
  PARPMON_REQUIRE(capacity >= series->value.size(), "buffer too small");
  std::copy(series->value.values().begin(), series->value.values().end(), out);
  return PARPMON_OK;
}

void parpmon_fit_options_default(parpmon_fit_options* options) {
  if (!options) return;
  options->kind = PARPMON_MODEL_PARPA;
  options->method = PARPMON_METHOD_YULE_WALKER;
  options->p_max = 6;
}

parpmon_status parpmon_model_fit(const parpmon_series* series, const parpmon_fit_options* options,
                                 parpmon_model** out) {
  PARPMON_REQUIRE(series && out, "null argument");
  *out = nullptr;
  parpmon_fit_options opts;
  parpmon_fit_options_default(&opts);
  if (options) opts = *options;
  PARPMON_REQUIRE(opts.kind == PARPMON_MODEL_PARP || opts.kind == PARPMON_MODEL_PARPA, "unknown model kind");
  PARPMON_REQUIRE(opts.method == PARPMON_METHOD_YULE_WALKER || opts.method == PARPMON_METHOD_LEAST_SQUARES,
                  "unknown estimation method");
  return guarded([&] {
    parpmon::EstimationSettings settings;
    settings.p_max = opts.p_max;
    settings.method = opts.method == PARPMON_METHOD_LEAST_SQUARES ? parpmon::EstimationMethod::kLeastSquares
                                                                  : parpmon::EstimationMethod::kYuleWalker;
    auto kind = opts.kind == PARPMON_MODEL_PARP ? parpmon::ModelKind::kParp : parpmon::ModelKind::kParpA;
    *out = new parpmon_model{parpmon::official_fit(series->value, kind, settings)};
  });
}

void parpmon_model_free(parpmon_model* model) { delete model; }

parpmon_model_kind parpmon_model_get_kind(const parpmon_model* model) {
  return model && model->value.has_annual() ? PARPMON_MODEL_PARPA : PARPMON_MODEL_PARP;
}

parpmon_status parpmon_model_month(const parpmon_model* model, int month, int* order, double* phi, size_t capacity,
                                   double* psi, double* resid_std) {
  PARPMON_REQUIRE(model, "model is null");
  PARPMON_REQUIRE(month >= 1 && month <= 12, "month must be in 1..12");
  const auto& m = model->value;
  const int p = m.orders[month - 1];
  if (order) *order = p;
  if (phi) {
    PARPMON_REQUIRE(capacity >= static_cast<size_t>(p), "phi buffer too small");
    std::copy(m.phi[month - 1].begin(), m.phi[month - 1].end(), phi);
  }
  if (psi) *psi = m.psi[month - 1];
  if (resid_std) *resid_std = m.resid_std[month - 1];
  return PARPMON_OK;
}

parpmon_status parpmon_model_to_json(const parpmon_model* model, char** out) {
  PARPMON_REQUIRE(model && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    const auto& m = model->value;
    nlohmann::ordered_json j;
    j["kind"] = m.has_annual() ? "PARp-A" : "PARp";
    j["fit_start"] = m.fit_start.str();
    j["fit_end"] = m.fit_end.str();
    nlohmann::ordered_json months = nlohmann::ordered_json::array();
    for (int i = 0; i < 12; ++i) {
      nlohmann::ordered_json e;
      e["month"] = i + 1;
      e["order"] = m.orders[i];
      e["phi"] = m.phi[i];
      if (m.has_annual()) {
        e["psi"] = m.psi[i];
        e["annual_mean"] = m.annual->a_mean[i];
        e["annual_std"] = m.annual->a_std[i];
      }
      e["mean"] = m.stats.mean[i];
      e["std"] = m.stats.std[i];
      e["resid_std"] = m.resid_std[i];
      months.push_back(e);
    }
    j["months"] = months;
    *out = copy_string(j.dump(2));
  });
}

parpmon_status parpmon_point_forecast(const parpmon_model* model, const parpmon_series* history, int horizon,
                                      double* out) {
  PARPMON_REQUIRE(model && history && out, "null argument");
  return guarded([&] {
    auto f = parpmon::point_forecast(model->value, history->value, horizon);
    std::copy(f.begin(), f.end(), out);
  });
}

void parpmon_simulation_options_default(parpmon_simulation_options* options) {
  if (!options) return;
  options->horizon = 60;
  options->omega_count = 2000;
  options->seed = 1;
  options->threads = 1;
}

parpmon_status parpmon_simulate(const parpmon_model* const* models, const parpmon_series* const* histories,
                                size_t count, const parpmon_simulation_options* options, parpmon_panel** out) {
  PARPMON_REQUIRE(models && histories && out && count > 0, "null argument or zero subsystems");
  *out = nullptr;
  for (size_t i = 0; i < count; ++i) PARPMON_REQUIRE(models[i] && histories[i], "null model or history");
  parpmon_simulation_options opts;
  parpmon_simulation_options_default(&opts);
  if (options) opts = *options;
  return guarded([&] {
    std::vector<parpmon::PeriodicModel> ms;
    std::vector<parpmon::MonthlySeries> hs;
    for (size_t i = 0; i < count; ++i) {
      ms.push_back(models[i]->value);
      hs.push_back(histories[i]->value);
    }
    parpmon::SimulationOptions so;
    so.horizon = opts.horizon;
    so.omega_count = opts.omega_count;
    so.seed = opts.seed;
    so.threads = opts.threads;
    auto correlation = parpmon::build_correlation(std::span<const parpmon::PeriodicModel>(ms));
    *out = new parpmon_panel{parpmon::simulate(ms, hs, correlation, so)};
  });
}

void parpmon_panel_free(parpmon_panel* panel) { delete panel; }

parpmon_status parpmon_panel_dims(const parpmon_panel* panel, int* omega_count, int* horizon, int* subsystems) {
  PARPMON_REQUIRE(panel, "panel is null");
  if (omega_count) *omega_count = panel->value.omega_count();
  if (horizon) *horizon = panel->value.horizon();
  if (subsystems) *subsystems = panel->value.subsystem_count();
  return PARPMON_OK;
}

parpmon_status parpmon_panel_value(const parpmon_panel* panel, int omega, int k, int subsystem, double* value) {
  PARPMON_REQUIRE(panel && value, "null argument");
  const auto& p = panel->value;
  PARPMON_REQUIRE(omega >= 0 && omega < p.omega_count(), "omega out of range");
  PARPMON_REQUIRE(k >= 1 && k <= p.horizon(), "k out of range");
  PARPMON_REQUIRE(subsystem >= 0 && subsystem < p.subsystem_count(), "subsystem out of range");
  *value = p.value(omega, k, subsystem);
  return PARPMON_OK;
}

parpmon_status parpmon_panel_mean(const parpmon_panel* panel, int subsystem, double* out, size_t capacity) {
  PARPMON_REQUIRE(panel && out, "null argument");
  const auto& p = panel->value;
  PARPMON_REQUIRE(subsystem >= 0 && subsystem < p.subsystem_count(), "subsystem out of range");
  PARPMON_REQUIRE(capacity >= static_cast<size_t>(p.horizon()), "buffer too small");
  auto mean = p.mean_forecast(subsystem);
  std::copy(mean.begin(), mean.end(), out);
  return PARPMON_OK;
}

parpmon_status parpmon_panel_write_csv(const parpmon_panel* panel, const char* path) {
  PARPMON_REQUIRE(panel && path, "null argument");
  return guarded([&] {
    std::ofstream out(path, std::ios::binary);
    if (!out) parpmon::fail(parpmon::ErrorCode::kIo, std::string("cannot write ") + path);
    parpmon::write_panel_csv(panel->value, out);
    if (!out) parpmon::fail(parpmon::ErrorCode::kIo, std::string("write failed: ") + path);
  });
}

parpmon_status parpmon_config_create(parpmon_config** out) {
  PARPMON_REQUIRE(out, "out is null");
  *out = nullptr;
  return guarded([&] { *out = new parpmon_config{}; });
}

parpmon_status parpmon_config_load(const char* path, parpmon_config** out) {
  PARPMON_REQUIRE(path && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new parpmon_config{parpmon::load_config(path)}; });
}

void parpmon_config_free(parpmon_config* config) { delete config; }

parpmon_status parpmon_config_set(parpmon_config* config, const char* key, const char* value) {
  PARPMON_REQUIRE(config && key && value, "null argument");
  return guarded([&] { config->value.set(key, value); });
}

parpmon_status parpmon_config_dump(const parpmon_config* config, char** out) {
  PARPMON_REQUIRE(config && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    std::string text;
    for (const auto& [key, value] : config->value.to_map()) text += key + " = " + value + "\n";
    *out = copy_string(text);
  });
}

parpmon_status parpmon_config_validate(const parpmon_config* config) {
  PARPMON_REQUIRE(config, "config is null");
  return guarded([&] { config->value.validate(); });
}

parpmon_status parpmon_run_backtest(const parpmon_config* config) {
  PARPMON_REQUIRE(config, "config is null");
  return guarded([&] { parpmon::run_backtest(config->value); });
}

parpmon_status parpmon_render_reports(const char* output_dir, int with_published_reference) {
  PARPMON_REQUIRE(output_dir, "output_dir is null");
  return guarded([&] { parpmon::render_reports(output_dir, with_published_reference != 0); });
}

}  // extern "C"
