#include "parpmon/run.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "parpmon/error.hpp"
#include "parpmon/io.hpp"
#include "parpmon/reference.hpp"

namespace parpmon {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kSummaryHorizons[] = {1, 6, 12, 24};

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  // Avoid "-0.00..." so reruns on equal data print identically.
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string panel_name(const std::string& forecaster, const std::string& subsystem) {
  return forecaster + "__" + subsystem + ".csv";
}

const char* mode_name(PctBiasMode mode) {
  return mode == PctBiasMode::kRatioOfMeans ? "ratio_of_means" : "mean_of_ratios";
}

// Collects every output in memory; nothing touches the output directory until commit().
class StagedOutput {
 public:
  explicit StagedOutput(fs::path root) : root_(std::move(root)) {}

  std::ostream& open(const fs::path& relative) {
    auto& entry = files_[relative.generic_string()];
    entry = std::make_unique<std::ostringstream>();
    return *entry;
  }

  std::vector<fs::path> commit() {
    const fs::path staging = root_.string() + ".partial";
    std::error_code ec;
    fs::remove_all(staging, ec);
    std::vector<fs::path> written;
    try {
      for (const auto& [relative, content] : files_) {
        const fs::path target = staging / relative;
        fs::create_directories(target.parent_path());
        std::ofstream out(target, std::ios::binary);
        out << content->str();
        if (!out) fail(ErrorCode::kIo, "cannot write " + target.string());
      }
      for (const auto& [relative, content] : files_) {
        const fs::path target = root_ / relative;
        fs::create_directories(target.parent_path());
        fs::rename(staging / relative, target);
        written.push_back(target);
      }
    } catch (const fs::filesystem_error& e) {
      fs::remove_all(staging, ec);
      fail(ErrorCode::kIo, e.what());
    } catch (...) {
      fs::remove_all(staging, ec);
      throw;
    }
    fs::remove_all(staging, ec);
    return written;
  }

 private:
  fs::path root_;
  std::map<std::string, std::unique_ptr<std::ostringstream>> files_;
};

struct Entry {
  std::string id;
  std::string label;
};

void stage_reports(StagedOutput& out, const std::vector<BiasReport>& reports, const std::vector<Entry>& forecasters,
                   const std::vector<std::string>& subsystems, int horizon) {
  for (const auto& report : reports) {
    write_bias_csv(report, out.open(fs::path("bias") / panel_name(report.forecaster, report.subsystem)));
  }
  for (const auto& subsystem : subsystems) {
    std::vector<BiasReport> rows;
    std::vector<std::string> labels;
    for (const auto& f : forecasters) {
      for (const auto& report : reports) {
        if (report.forecaster == f.id && report.subsystem == subsystem) {
          rows.push_back(report);
          labels.push_back(f.label);
        }
      }
    }
    write_summary_csv(rows, labels, horizon, out.open("summary_" + subsystem + ".csv"));
  }
}

}  // namespace

void write_panel_csv(const ErrorPanel& panel, std::ostream& out) {
  out << "origin,k,forecast,observed,error\n";
  for (std::size_t r = 0; r < panel.origins.size(); ++r) {
    for (std::size_t k = 1; k <= panel.forecasts[r].size(); ++k) {
      out << panel.origins[r].str() << ',' << k << ',' << format_double(panel.forecasts[r][k - 1]) << ','
          << format_double(panel.observed[r][k - 1]) << ',' << format_double(panel.error(r, static_cast<int>(k)))
          << '\n';
    }
  }
}

ErrorPanel read_panel_csv(const fs::path& path, const std::string& forecaster, const std::string& subsystem,
                          int horizon) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open panel " + path.string());
  ErrorPanel panel;
  panel.forecaster = forecaster;
  panel.subsystem = subsystem;
  panel.horizon = horizon;
  std::string line;
  std::getline(in, line);
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream cells(line);
    std::string origin, k, forecast, observed;
    std::getline(cells, origin, ',');
    std::getline(cells, k, ',');
    std::getline(cells, forecast, ',');
    std::getline(cells, observed, ',');
    try {
      const YearMonth when = YearMonth::parse(origin);
      const int step = std::stoi(k);
      if (panel.origins.empty() || panel.origins.back() != when) {
        panel.origins.push_back(when);
        panel.forecasts.emplace_back();
        panel.observed.emplace_back();
        panel.log.push_back({when, true, {}});
      }
      if (step != static_cast<int>(panel.forecasts.back().size()) + 1 || step > horizon) {
        fail(ErrorCode::kParse, "unexpected step " + k);
      }
      panel.forecasts.back().push_back(std::stod(forecast));
      panel.observed.back().push_back(std::stod(observed));
    } catch (const std::exception& e) {
      fail(ErrorCode::kParse, path.string() + " row " + std::to_string(row) + ": " + e.what());
    }
  }
  return panel;
}

void write_bias_csv(const BiasReport& report, std::ostream& out) {
  out << "k,n_k,bias_avgMW,ci_low,ci_high,pct_bias\n";
  for (const auto& row : report.rows) {
    out << row.k << ',' << row.n << ',' << fixed(row.bias, 6) << ',' << fixed(row.ci_low, 6) << ','
        << fixed(row.ci_high, 6) << ',' << fixed(row.pct_bias, 6) << '\n';
  }
}

void write_summary_csv(const std::vector<BiasReport>& reports, const std::vector<std::string>& labels, int horizon,
                       std::ostream& out) {
  out << "forecaster";
  for (int k : kSummaryHorizons) {
    if (k <= horizon) out << ",K=" << k;
  }
  out << ",cumulative,pct_of_official\n";
  double official = std::nan("");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].forecaster == "official_parpa") official = reports[i].cumulative_bias;
  }
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const BiasReport& r = reports[i];
    out << '"' << labels[i] << '"';
    for (int k : kSummaryHorizons) {
      if (k > horizon) continue;
      double v = std::nan("");
      for (const auto& row : r.rows) {
        if (row.k == k) v = row.bias / 1000.0;
      }
      out << ',' << fixed(v, 4);
    }
    out << ',' << fixed(r.cumulative_bias / 1000.0, 4) << ','
        << fixed(std::isfinite(official) && official != 0.0 ? 100.0 * r.cumulative_bias / official : std::nan(""), 1)
        << '\n';
  }
}

RunResult run_backtest(const RunConfig& input) {
  input.validate();
  RunConfig config = input;
  config.estimation.omega_count = config.omega_count;

  std::vector<MonthlySeries> series;
  std::vector<std::string> subsystems;
  for (const auto& [name, path] : config.data) {
    // Rows are selected by subsystem name when the file has that column; a
    // single-subsystem file labelled differently is taken whole.
    auto load = [&]() {
      try {
        return ingest_csv(path, config.columns, name);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kInsufficientData) throw;
        return ingest_csv(path, config.columns);
      }
    };
    MonthlySeries s = load();
    s = MonthlySeries(s.start(), {s.values().begin(), s.values().end()}, name);
    const int training = (config.span.first - 1) - s.start() + 1;
    if (training < config.min_training_months) {
      fail(ErrorCode::kConfig, name + ": span.start " + config.span.first.str() + " leaves " +
                                   std::to_string(training) + " training months, need " +
                                   std::to_string(config.min_training_months));
    }
    if (s.end() < config.span.first) {
      fail(ErrorCode::kConfig, name + ": data end " + s.end().str() + " before span.start");
    }
    series.push_back(std::move(s));
    subsystems.push_back(name);
  }

  RunResult result;
  BacktestOptions options;
  options.horizon = config.horizon;
  options.seed = config.seed;
  options.threads = config.threads;
  Json log = Json::array();
  for (const auto& spec : config.forecasters) {
    for (const auto& s : series) {
      std::unique_ptr<Forecaster> forecaster = spec.kind == ForecasterKind::kPerfectForesight
                                                   ? make_perfect_foresight(s)
                                                   : make_forecaster(spec, config.estimation);
      ErrorPanel panel = rolling_backtest(s, *forecaster, config.span, options);
      panel.forecaster = spec.id();
      for (const auto& entry : panel.log) {
        Json item = {{"forecaster", spec.id()}, {"subsystem", s.label()}, {"origin", entry.origin.str()},
                     {"ok", entry.ok}};
        if (!entry.ok) item["message"] = entry.message;
        log.push_back(item);
      }
      if (panel.origins.empty()) {
        fail(ErrorCode::kInsufficientData, spec.id() + " failed at every origin for " + s.label() + ": " +
                                               (panel.log.empty() ? std::string() : panel.log.front().message));
      }
      result.reports.push_back(make_report(panel, config.pct_mode));
      result.panels.push_back(std::move(panel));
    }
  }

  StagedOutput out(config.output_dir);
  for (const auto& panel : result.panels) {
    write_panel_csv(panel, out.open(fs::path("panels") / panel_name(panel.forecaster, panel.subsystem)));
  }
  std::vector<Entry> entries;
  for (const auto& spec : config.forecasters) entries.push_back({spec.id(), spec.label()});
  stage_reports(out, result.reports, entries, subsystems, config.horizon);

  Json manifest;
  manifest["tool"] = "parpmon";
  Json echo = Json::object();
  for (const auto& [key, value] : config.to_map()) echo[key] = value;
  manifest["config"] = echo;
  manifest["seed"] = config.seed;
  manifest["horizon"] = config.horizon;
  manifest["pct_bias"] = mode_name(config.pct_mode);
  manifest["subsystems"] = subsystems;
  Json fjson = Json::array();
  for (const auto& spec : config.forecasters) {
    fjson.push_back({{"id", spec.id()}, {"spec", spec.spec_string()}, {"label", spec.label()}});
  }
  manifest["forecasters"] = fjson;
  Json warnings = Json::array();
  for (const auto& report : result.reports) {
    for (const auto& w : report.warnings) warnings.push_back(report.forecaster + "/" + report.subsystem + ": " + w);
  }
  manifest["warnings"] = warnings;
  manifest["fit_log"] = log;
  out.open("manifest.json") << manifest.dump(2) << '\n';

  result.files = out.commit();
  return result;
}

std::vector<fs::path> render_reports(const fs::path& output_dir, bool with_published_reference) {
  std::ifstream in(output_dir / "manifest.json");
  if (!in) fail(ErrorCode::kIo, "no manifest.json in " + output_dir.string());
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const std::exception& e) {
    fail(ErrorCode::kParse, std::string("manifest.json: ") + e.what());
  }
  const int horizon = manifest.at("horizon").get<int>();
  const PctBiasMode mode = manifest.at("pct_bias").get<std::string>() == "mean_of_ratios"
                               ? PctBiasMode::kMeanOfRatios
                               : PctBiasMode::kRatioOfMeans;
  const auto subsystems = manifest.at("subsystems").get<std::vector<std::string>>();
  std::vector<Entry> entries;
  for (const auto& f : manifest.at("forecasters")) {
    entries.push_back({f.at("id").get<std::string>(), f.at("label").get<std::string>()});
  }

  std::vector<BiasReport> reports;
  for (const auto& f : entries) {
    for (const auto& s : subsystems) {
      ErrorPanel panel = read_panel_csv(output_dir / "panels" / panel_name(f.id, s), f.id, s, horizon);
      reports.push_back(make_report(panel, mode));
    }
  }
  StagedOutput out(output_dir);
  stage_reports(out, reports, entries, subsystems, horizon);
  if (with_published_reference) {
    std::ostream& ref = out.open("published_reference.csv");
    ref << "subsystem,model,K=1,K=6,K=12,K=24,cumulative\n";
    for (const auto& row : kPublishedBias) {
      ref << row.subsystem << ",\"" << row.model << "\"," << fixed(row.k1, 2) << ',' << fixed(row.k6, 2) << ','
          << fixed(row.k12, 2) << ',' << fixed(row.k24, 2) << ',' << fixed(row.cumulative, 2) << '\n';
    }
  }
  return out.commit();
}

}  // namespace parpmon
