#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace guardrail {

// Calendar date without time of day. Stored as days since the Unix epoch.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  // Strict ISO-8601 calendar date "YYYY-MM-DD"; nullopt on anything else.
  static std::optional<Date> parse(std::string_view text);
  // Throws Error(invalid_input) when `text` is not a valid date.
  static Date parse_or_throw(std::string_view text);

  std::string iso() const;
  std::chrono::sys_days days() const { return days_; }
  std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days_}; }
  std::chrono::weekday weekday() const { return std::chrono::weekday{days_}; }
  long serial() const { return days_.time_since_epoch().count(); }

  Date plus_days(long n) const { return Date{days_ + std::chrono::days{n}}; }
  friend long operator-(Date a, Date b) { return (a.days_ - b.days_).count(); }

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

std::optional<std::chrono::weekday> parse_weekday(std::string_view name);
std::string weekday_name(std::chrono::weekday wd);

}  // namespace guardrail
