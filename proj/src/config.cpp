#include "parpmon/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "parpmon/error.hpp"

namespace parpmon {

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

template <class T>
T to_number(const std::string& key, const std::string& value) {
  T out{};
  auto r = std::from_chars(value.data(), value.data() + value.size(), out);
  if (r.ec != std::errc{} || r.ptr != value.data() + value.size()) {
    fail(ErrorCode::kConfig, "key '" + key + "': '" + value + "' is not a valid number");
  }
  return out;
}

YearMonth to_month(const std::string& key, const std::string& value) {
  try {
    return YearMonth::parse(value);
  } catch (const Error& e) {
    fail(ErrorCode::kConfig, "key '" + key + "': " + e.what());
  }
}

}  // namespace

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key.rfind("data.", 0) == 0) {
    const std::string name = key.substr(5);
    if (name.empty()) fail(ErrorCode::kConfig, "data key needs a subsystem name, e.g. data.SE");
    for (auto& entry : data) {
      if (entry.first == name) {
        entry.second = value;
        return;
      }
    }
    data.emplace_back(name, value);
  } else if (key == "csv.date_column") {
    columns.date = value;
  } else if (key == "csv.value_column") {
    columns.value = value;
  } else if (key == "csv.subsystem_column") {
    columns.subsystem = value;
  } else if (key == "span.start") {
    span.first = to_month(key, value);
  } else if (key == "span.end") {
    span.last = to_month(key, value);
  } else if (key == "K") {
    horizon = to_number<int>(key, value);
  } else if (key == "simulation_horizon") {
    simulation_horizon = to_number<int>(key, value);
  } else if (key == "omega") {
    omega_count = to_number<int>(key, value);
    estimation.omega_count = omega_count;
  } else if (key == "seed") {
    seed = to_number<std::uint64_t>(key, value);
  } else if (key == "forecasters") {
    std::vector<ForecasterSpec> specs;
    std::stringstream list(value);
    std::string item;
    while (std::getline(list, item, ',')) {
      if (!trim(item).empty()) specs.push_back(ForecasterSpec::parse(item));
    }
    if (specs.empty()) fail(ErrorCode::kConfig, "forecasters list is empty");
    forecasters = std::move(specs);
  } else if (key == "estimation_lag") {
    estimation.estimation_lag = to_number<int>(key, value);
  } else if (key == "p_max") {
    estimation.p_max = to_number<int>(key, value);
  } else if (key == "method") {
    if (value == "yule_walker") {
      estimation.method = EstimationMethod::kYuleWalker;
    } else if (value == "least_squares") {
      estimation.method = EstimationMethod::kLeastSquares;
    } else {
      fail(ErrorCode::kConfig, "method must be yule_walker or least_squares");
    }
  } else if (key == "functional") {
    if (value == "scenario_mean") {
      estimation.functional = ForecastFunctional::kScenarioMean;
    } else if (value == "deterministic") {
      estimation.functional = ForecastFunctional::kDeterministic;
    } else {
      fail(ErrorCode::kConfig, "functional must be scenario_mean or deterministic");
    }
  } else if (key == "pct_bias") {
    if (value == "ratio_of_means") {
      pct_mode = PctBiasMode::kRatioOfMeans;
    } else if (value == "mean_of_ratios") {
      pct_mode = PctBiasMode::kMeanOfRatios;
    } else {
      fail(ErrorCode::kConfig, "pct_bias must be ratio_of_means or mean_of_ratios");
    }
  } else if (key == "min_training_months") {
    min_training_months = to_number<int>(key, value);
  } else if (key == "threads") {
    threads = to_number<int>(key, value);
  } else if (key == "output_dir") {
    output_dir = value;
  } else {
    fail(ErrorCode::kConfig, "unknown key '" + key + "'");
  }
}

void RunConfig::validate() const {
  if (data.empty()) fail(ErrorCode::kConfig, "no data.<subsystem> entries");
  if (horizon < 1) fail(ErrorCode::kConfig, "K must be at least 1");
  if (simulation_horizon < 1) fail(ErrorCode::kConfig, "simulation_horizon must be at least 1");
  if (horizon > simulation_horizon) {
    fail(ErrorCode::kConfig, "K = " + std::to_string(horizon) + " exceeds simulation_horizon = " +
                                 std::to_string(simulation_horizon));
  }
  if (omega_count < 1) fail(ErrorCode::kConfig, "omega must be at least 1");
  if (span.last < span.first) fail(ErrorCode::kConfig, "span.end precedes span.start");
  if (estimation.estimation_lag < 0) fail(ErrorCode::kConfig, "estimation_lag must be non-negative");
  if (estimation.p_max < 1) fail(ErrorCode::kConfig, "p_max must be at least 1");
  if (min_training_months < 1) fail(ErrorCode::kConfig, "min_training_months must be at least 1");
  if (threads < 1) fail(ErrorCode::kConfig, "threads must be at least 1");
  if (forecasters.empty()) fail(ErrorCode::kConfig, "no forecasters");
  for (const auto& f : forecasters) f.validate();
  if (output_dir.empty()) fail(ErrorCode::kConfig, "output_dir is empty");
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, path] : data) out["data." + name] = path.string();
  out["csv.date_column"] = columns.date;
  out["csv.value_column"] = columns.value;
  out["csv.subsystem_column"] = columns.subsystem;
  out["span.start"] = span.first.str();
  out["span.end"] = span.last.str();
  out["K"] = std::to_string(horizon);
  out["simulation_horizon"] = std::to_string(simulation_horizon);
  out["omega"] = std::to_string(omega_count);
  out["seed"] = std::to_string(seed);
  std::string list;
  for (const auto& f : forecasters) list += (list.empty() ? "" : ",") + f.spec_string();
  out["forecasters"] = list;
  out["estimation_lag"] = std::to_string(estimation.estimation_lag);
  out["p_max"] = std::to_string(estimation.p_max);
  out["method"] = estimation.method == EstimationMethod::kYuleWalker ? "yule_walker" : "least_squares";
  out["functional"] = estimation.functional == ForecastFunctional::kScenarioMean ? "scenario_mean" : "deterministic";
  out["pct_bias"] = pct_mode == PctBiasMode::kRatioOfMeans ? "ratio_of_means" : "mean_of_ratios";
  out["min_training_months"] = std::to_string(min_training_months);
  out["output_dir"] = output_dir.string();
  return out;
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kConfig, "line " + std::to_string(number) + ": expected 'key = value'");
    }
    try {
      config.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(number) + ": " + e.what());
    }
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config " + path.string());
  RunConfig config = parse_config(in);
  // Relative data paths resolve against the config file's directory.
  for (auto& entry : config.data) {
    if (entry.second.is_relative()) entry.second = path.parent_path() / entry.second;
  }
  return config;
}

}  // namespace parpmon
