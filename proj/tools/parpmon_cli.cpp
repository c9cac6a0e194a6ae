// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "parpmon/parpmon.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int report_failure(parpmon_status status, const std::string& context) {
  std::cerr << "parpmon: " << context << ": " << parpmon_status_name(status) << ": " << parpmon_last_error() << '\n';
  return parpmon_status_is_validation(status) ? kExitValidation : kExitRuntime;
}

struct SeriesDeleter {
  void operator()(parpmon_series* s) const { parpmon_series_free(s); }
};
struct ModelDeleter {
  void operator()(parpmon_model* m) const { parpmon_model_free(m); }
};
struct PanelDeleter {
  void operator()(parpmon_panel* p) const { parpmon_panel_free(p); }
};
struct ConfigDeleter {
  void operator()(parpmon_config* c) const { parpmon_config_free(c); }
};
using SeriesPtr = std::unique_ptr<parpmon_series, SeriesDeleter>;
using ModelPtr = std::unique_ptr<parpmon_model, ModelDeleter>;
using PanelPtr = std::unique_ptr<parpmon_panel, PanelDeleter>;
using ConfigPtr = std::unique_ptr<parpmon_config, ConfigDeleter>;

struct ModelFlags {
  std::string kind = "parpa";
  std::string method = "yule_walker";
  int p_max = 6;

  void add_to(CLI::App* app) {
    app->add_option("--kind", kind, "Model family")->check(CLI::IsMember({"parp", "parpa"}));
    app->add_option("--method", method, "Estimator")->check(CLI::IsMember({"yule_walker", "least_squares"}));
    app->add_option("--p-max", p_max, "Largest AR order considered per month")->check(CLI::PositiveNumber);
  }

  parpmon_fit_options options() const {
    parpmon_fit_options o;
    parpmon_fit_options_default(&o);
    o.kind = kind == "parp" ? PARPMON_MODEL_PARP : PARPMON_MODEL_PARPA;
    o.method = method == "least_squares" ? PARPMON_METHOD_LEAST_SQUARES : PARPMON_METHOD_YULE_WALKER;
    o.p_max = p_max;
    return o;
  }
};

int run_fit(const std::string& data, const std::string& subsystem, const ModelFlags& flags) {
  parpmon_series* raw = nullptr;
  if (auto st = parpmon_series_load_csv(data.c_str(), subsystem.empty() ? nullptr : subsystem.c_str(), &raw)) {
    return report_failure(st, "loading " + data);
  }
  SeriesPtr series(raw);
  parpmon_model* model_raw = nullptr;
  const parpmon_fit_options options = flags.options();
  if (auto st = parpmon_model_fit(series.get(), &options, &model_raw)) return report_failure(st, "fit");
  ModelPtr model(model_raw);
  char* json = nullptr;
  if (auto st = parpmon_model_to_json(model.get(), &json)) return report_failure(st, "fit");
  std::cout << json << '\n';
  parpmon_string_free(json);
  return 0;
}

int run_simulate(const std::vector<std::string>& data, const ModelFlags& flags, parpmon_simulation_options sim,
                 const std::string& out) {
  std::vector<SeriesPtr> series;
  std::vector<ModelPtr> models;
  const parpmon_fit_options options = flags.options();
  for (const auto& item : data) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::cerr << "parpmon: --data expects NAME=FILE, got '" << item << "'\n";
      return kExitValidation;
    }
    const std::string name = item.substr(0, eq);
    const std::string path = item.substr(eq + 1);
    parpmon_series* raw = nullptr;
    if (auto st = parpmon_series_load_csv(path.c_str(), name.c_str(), &raw)) {
      return report_failure(st, "loading " + path);
    }
    // Relabel with the requested name so the panel uses it.
    std::vector<double> values(parpmon_series_length(raw));
    int year = 0, month = 0;
    parpmon_series_values(raw, values.data(), values.size());
    parpmon_series_start(raw, &year, &month);
    parpmon_series_free(raw);
    if (auto st = parpmon_series_create(year, month, values.data(), values.size(), name.c_str(), &raw)) {
      return report_failure(st, "loading " + path);
    }
    series.emplace_back(raw);
    parpmon_model* model = nullptr;
    if (auto st = parpmon_model_fit(series.back().get(), &options, &model)) return report_failure(st, "fit " + name);
    models.emplace_back(model);
  }
  std::vector<const parpmon_model*> mptr;
  std::vector<const parpmon_series*> sptr;
  for (std::size_t i = 0; i < models.size(); ++i) {
    mptr.push_back(models[i].get());
    sptr.push_back(series[i].get());
  }
  parpmon_panel* raw = nullptr;
  if (auto st = parpmon_simulate(mptr.data(), sptr.data(), mptr.size(), &sim, &raw)) {
    return report_failure(st, "simulate");
  }
  PanelPtr panel(raw);
  if (auto st = parpmon_panel_write_csv(panel.get(), out.c_str())) return report_failure(st, "writing " + out);
  std::cerr << "wrote " << sim.omega_count << " x " << sim.horizon << " x " << mptr.size() << " panel to " << out
            << '\n';
  return 0;
}

int run_backtest(const std::string& config_path, const std::vector<std::string>& overrides, const std::string& output) {
  parpmon_config* raw = nullptr;
  if (auto st = parpmon_config_load(config_path.c_str(), &raw)) return report_failure(st, "config " + config_path);
  ConfigPtr config(raw);
  if (const char* env = std::getenv("PARPMON_OUTPUT_DIR"); env && *env) {
    if (auto st = parpmon_config_set(config.get(), "output_dir", env)) return report_failure(st, "PARPMON_OUTPUT_DIR");
  }
  for (const auto& item : overrides) {
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      std::cerr << "parpmon: --set expects KEY=VALUE, got '" << item << "'\n";
      return kExitValidation;
    }
    if (auto st = parpmon_config_set(config.get(), item.substr(0, eq).c_str(), item.substr(eq + 1).c_str())) {
      return report_failure(st, "--set " + item);
    }
  }
  if (!output.empty()) {
    if (auto st = parpmon_config_set(config.get(), "output_dir", output.c_str())) return report_failure(st, "--output");
  }
  if (auto st = parpmon_config_validate(config.get())) return report_failure(st, "config");
  if (auto st = parpmon_run_backtest(config.get())) return report_failure(st, "backtest");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic autoregressive inflow models: estimation, scenarios and forecast-bias monitoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", parpmon_version());

  auto* fit = app.add_subcommand("fit", "Estimate a model and print it as JSON");
  std::string fit_data, fit_subsystem;
  ModelFlags fit_flags;
  fit->add_option("--data", fit_data, "Monthly CSV (date,value[,subsystem])")->required();
  fit->add_option("--subsystem", fit_subsystem, "Subsystem to select from a multi-subsystem file");
  fit_flags.add_to(fit);

  auto* sim = app.add_subcommand("simulate", "Fit models and write a joint scenario panel");
  std::vector<std::string> sim_data;
  ModelFlags sim_flags;
  parpmon_simulation_options sim_options;
  parpmon_simulation_options_default(&sim_options);
  std::string sim_out;
  sim->add_option("--data", sim_data, "NAME=FILE, once per subsystem")->required();
  sim->add_option("--horizon", sim_options.horizon, "Months ahead")->check(CLI::PositiveNumber);
  sim->add_option("--omega", sim_options.omega_count, "Number of scenarios")->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_options.seed, "Root seed");
  sim->add_option("--threads", sim_options.threads, "Worker threads")->check(CLI::PositiveNumber);
  sim->add_option("--out", sim_out, "Panel CSV (omega,k,subsystem,value)")->required();
  sim_flags.add_to(sim);

  auto* bt = app.add_subcommand("backtest", "Rolling-origin bias evaluation driven by a config file");
  std::string bt_config, bt_output;
  std::vector<std::string> bt_set;
  std::string bt_seed, bt_threads;
  bt->add_option("--config", bt_config, "key = value config file")->required();
  bt->add_option("--set", bt_set, "Override a config key (KEY=VALUE), repeatable");
  bt->add_option("--output", bt_output, "Output directory (overrides config and PARPMON_OUTPUT_DIR)");
  bt->add_option("--seed", bt_seed, "Shorthand for --set seed=N");
  bt->add_option("--threads", bt_threads, "Shorthand for --set threads=N");

  auto* rep = app.add_subcommand("report", "Re-render bias tables from a finished backtest");
  std::string rep_dir;
  bool with_reference = false;
  rep->add_option("--output", rep_dir, "Backtest output directory")->required();
  rep->add_flag("--with-reference", with_reference, "Also write published external-model reference values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (*fit) return run_fit(fit_data, fit_subsystem, fit_flags);
  if (*sim) return run_simulate(sim_data, sim_flags, sim_options, sim_out);
  if (*bt) {
    if (!bt_seed.empty()) bt_set.push_back("seed=" + bt_seed);
    if (!bt_threads.empty()) bt_set.push_back("threads=" + bt_threads);
    return run_backtest(bt_config, bt_set, bt_output);
  }
  if (*rep) {
    if (auto st = parpmon_render_reports(rep_dir.c_str(), with_reference ? 1 : 0)) return report_failure(st, "report");
    return 0;
  }
  return kExitValidation;
}
