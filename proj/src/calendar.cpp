#include "parpmon/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "parpmon/error.hpp"

namespace parpmon {

std::string YearMonth::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

YearMonth YearMonth::parse(std::string_view text) {
  auto bad = [&] { fail(ErrorCode::kParse, "malformed date '" + std::string(text) + "' (expected YYYY-MM)"); };
  while (!text.empty() && (text.front() == ' ' || text.front() == '"')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '"' || text.back() == '\r')) text.remove_suffix(1);
  if (text.size() != 7 && text.size() != 10) bad();
  if (text[4] != '-' || (text.size() == 10 && text[7] != '-')) bad();
  YearMonth ym;
  auto y = std::from_chars(text.data(), text.data() + 4, ym.year);
  auto m = std::from_chars(text.data() + 5, text.data() + 7, ym.month);
  if (y.ec != std::errc{} || y.ptr != text.data() + 4 || m.ec != std::errc{} || m.ptr != text.data() + 7) bad();
  if (ym.month < 1 || ym.month > 12) bad();
  return ym;
}

}  // namespace parpmon
