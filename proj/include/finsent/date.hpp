#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace finsent {

/// Calendar date stored as days since 1970-01-01.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::int32_t days_since_epoch) : days_(days_since_epoch) {}
  Date(int year, unsigned month, unsigned day);

  constexpr std::int32_t days() const noexcept { return days_; }
  std::chrono::year_month_day ymd() const;
  /// 0 = Monday ... 6 = Sunday.
  unsigned weekday_iso() const;

  std::string iso() const;

  constexpr Date operator+(std::int32_t n) const noexcept { return Date(days_ + n); }
  constexpr std::int32_t operator-(Date other) const noexcept { return days_ - other.days_; }
  constexpr auto operator<=>(const Date&) const = default;

 private:
  std::int32_t days_ = 0;
};

/// Parses "YYYY-MM-DD", optionally followed by a time part ("T..." or " ...").
std::optional<Date> parse_date(std::string_view text);

}  // namespace finsent
