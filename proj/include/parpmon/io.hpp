#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "parpmon/series.hpp"

namespace parpmon {

/// Column names of the monthly CSV layout. The subsystem column is optional in
/// the file; when present and `subsystem` is requested, other rows are skipped.
struct CsvColumns {
  std::string date = "date";
  std::string value = "value";
  std::string subsystem = "subsystem";
};

/// Reads a contiguous, sorted monthly series. Errors: kIo (unreadable),
/// kParse (malformed date or number, missing column), kGap (missing month,
/// named in the message), kValidation (nonpositive value, with row number).
MonthlySeries ingest_csv(const std::filesystem::path& path, const CsvColumns& columns = {},
                         const std::optional<std::string>& subsystem = std::nullopt);
MonthlySeries parse_series_csv(std::istream& in, const CsvColumns& columns = {},
                               const std::optional<std::string>& subsystem = std::nullopt,
                               const std::string& source = "<stream>");

/// Writes date,value[,subsystem] with round-trip precision.
void write_series_csv(const MonthlySeries& series, std::ostream& out, bool with_subsystem = false);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace parpmon
