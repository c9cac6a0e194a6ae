#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "parpmon/benchmarks.hpp"
#include "parpmon/bias.hpp"
#include "parpmon/io.hpp"

namespace parpmon {

/// Everything a backtest run needs. Defaults follow the reference case study:
/// forecasts issued Jan-2011..Sep-2024, K = 24, 60-month simulation horizon,
/// 2000 scenarios, no estimation lag.
struct RunConfig {
  std::vector<std::pair<std::string, std::filesystem::path>> data;  // subsystem -> csv
  CsvColumns columns;
  EvaluationSpan span{{2011, 1}, {2024, 9}};
  int horizon = 24;
  int simulation_horizon = 60;
  int omega_count = 2000;
  std::uint64_t seed = 1;
  std::vector<ForecasterSpec> forecasters{ForecasterSpec{}};
  EstimationSettings estimation;
  PctBiasMode pct_mode = PctBiasMode::kRatioOfMeans;
  int min_training_months = 48;
  int threads = 1;
  std::filesystem::path output_dir = "parpmon-out";

  /// Applies one `key = value` setting. Throws kConfig on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Cross-field checks that do not need the data (K <= simulation horizon, ...).
  void validate() const;
  /// Canonical key/value echo; parsing it back reproduces the config. The
  /// thread count is left out since it never changes results.
  std::map<std::string, std::string> to_map() const;
};

/// Flat `key = value` text, '#' starts a comment.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace parpmon
