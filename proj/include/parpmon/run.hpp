#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "parpmon/bias.hpp"
#include "parpmon/config.hpp"

namespace parpmon {

struct RunResult {
  std::vector<ErrorPanel> panels;
  std::vector<BiasReport> reports;
  std::vector<std::filesystem::path> files;
};

/// Rolling backtest of every (forecaster, subsystem) pair, then writes
///   panels/<forecaster>__<subsystem>.csv  origin,k,forecast,observed,error
///   bias/<forecaster>__<subsystem>.csv    k,n_k,bias_avgMW,ci_low,ci_high,pct_bias
///   summary_<subsystem>.csv               table layout in avg GW
///   manifest.json                         config echo and per-origin fit log
/// Files are staged and moved into place only once everything succeeded.
RunResult run_backtest(const RunConfig& config);

/// Re-renders bias and summary files of a finished run from its stored panels.
std::vector<std::filesystem::path> render_reports(const std::filesystem::path& output_dir,
                                                  bool with_published_reference = false);

ErrorPanel read_panel_csv(const std::filesystem::path& path, const std::string& forecaster,
                          const std::string& subsystem, int horizon);
void write_panel_csv(const ErrorPanel& panel, std::ostream& out);
void write_bias_csv(const BiasReport& report, std::ostream& out);
/// Rows are forecasters; columns k = 1, 6, 12, 24 (those <= K) and the
/// cumulative bias, all in avg GW, plus cumulative as % of the official PARp-A.
void write_summary_csv(const std::vector<BiasReport>& reports, const std::vector<std::string>& labels,
                       int horizon, std::ostream& out);

}  // namespace parpmon
