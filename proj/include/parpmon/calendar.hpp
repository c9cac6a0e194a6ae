#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace parpmon {

/// A calendar month. Arithmetic is purely calendrical (no day component).
struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  /// Months since year 0, January; convenient for differences.
  constexpr int ordinal() const { return year * 12 + (month - 1); }

  static constexpr YearMonth from_ordinal(int ordinal) {
    int y = ordinal >= 0 ? ordinal / 12 : -((-ordinal + 11) / 12);
    return {y, ordinal - y * 12 + 1};
  }

  constexpr YearMonth operator+(int months) const {
    return from_ordinal(ordinal() + months);
  }
  constexpr YearMonth operator-(int months) const {
    return from_ordinal(ordinal() - months);
  }
  constexpr int operator-(const YearMonth& other) const {
    return ordinal() - other.ordinal();
  }

  constexpr auto operator<=>(const YearMonth& other) const {
    return ordinal() <=> other.ordinal();
  }
  constexpr bool operator==(const YearMonth& other) const = default;

  /// "YYYY-MM"
  std::string str() const;

  /// Parses "YYYY-MM" (also accepts "YYYY-MM-DD", day ignored). Throws kParse.
  static YearMonth parse(std::string_view text);
};

}  // namespace parpmon
