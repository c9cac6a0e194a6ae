#include "parpmon/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "parpmon/error.hpp"

namespace parpmon {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t from = 0;
  while (true) {
    std::size_t comma = line.find(',', from);
    cells.push_back(trim(line.substr(from, comma == std::string_view::npos ? comma : comma - from)));
    if (comma == std::string_view::npos) break;
    from = comma + 1;
  }
  return cells;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

MonthlySeries parse_series_csv(std::istream& in, const CsvColumns& columns, const std::optional<std::string>& subsystem,
                               const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::kParse, source + ": empty file");
  const auto header = split(line);
  auto find = [&](const std::string& name) -> std::ptrdiff_t {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<std::ptrdiff_t>(i);
    }
    return -1;
  };
  const std::ptrdiff_t date_col = find(columns.date);
  const std::ptrdiff_t value_col = find(columns.value);
  const std::ptrdiff_t sub_col = columns.subsystem.empty() ? -1 : find(columns.subsystem);
  if (date_col < 0) fail(ErrorCode::kParse, source + ": missing column '" + columns.date + "'");
  if (value_col < 0) fail(ErrorCode::kParse, source + ": missing column '" + columns.value + "'");

  std::optional<YearMonth> start;
  YearMonth expected;
  std::vector<double> values;
  std::string label = subsystem.value_or("");
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    const std::string where = source + " row " + std::to_string(row);
    auto cell = [&](std::ptrdiff_t col) {
      if (static_cast<std::size_t>(col) >= cells.size()) fail(ErrorCode::kParse, where + ": too few columns");
      return cells[static_cast<std::size_t>(col)];
    };
    if (sub_col >= 0) {
      std::string_view name = cell(sub_col);
      if (subsystem) {
        if (name != *subsystem) continue;
      } else if (label.empty()) {
        label = std::string(name);
      } else if (name != label) {
        fail(ErrorCode::kValidation, source + " holds several subsystems ('" + label + "', '" + std::string(name) +
                                         "'); select one");
      }
    }
    YearMonth when;
    try {
      when = YearMonth::parse(cell(date_col));
    } catch (const Error& e) {
      fail(ErrorCode::kParse, where + ": " + e.what());
    }
    std::string_view text = cell(value_col);
    double value = 0.0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), value);
    if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
      fail(ErrorCode::kParse, where + ": malformed value '" + std::string(text) + "'");
    }
    if (!(value > 0.0) || !std::isfinite(value)) {
      fail(ErrorCode::kValidation, where + ": value " + std::string(text) + " must be positive");
    }
    if (!start) {
      start = when;
    } else if (when > expected) {
      fail(ErrorCode::kGap, where + ": missing month " + expected.str());
    } else if (when < expected) {
      fail(ErrorCode::kValidation, where + ": " + when.str() + " is out of order or duplicated");
    }
    expected = when + 1;
    values.push_back(value);
  }
  if (!start) {
    fail(ErrorCode::kInsufficientData,
         source + ": no data rows" + (subsystem ? " for subsystem '" + *subsystem + "'" : std::string()));
  }
  return MonthlySeries(*start, std::move(values), label);
}

MonthlySeries ingest_csv(const std::filesystem::path& path, const CsvColumns& columns,
                         const std::optional<std::string>& subsystem) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  MonthlySeries series = parse_series_csv(in, columns, subsystem, path.string());
  if (series.label().empty()) return MonthlySeries(series.start(), {series.values().begin(), series.values().end()},
                                                   path.stem().string());
  return series;
}

void write_series_csv(const MonthlySeries& series, std::ostream& out, bool with_subsystem) {
  out << "date,value" << (with_subsystem ? ",subsystem" : "") << '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.stamp(i).str() << ',' << format_double(series[i]);
    if (with_subsystem) out << ',' << series.label();
    out << '\n';
  }
}

}  // namespace parpmon
