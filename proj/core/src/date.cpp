#include "guardrail/date.hpp"

#include <array>
#include <cctype>
#include <cstdio>

#include "guardrail/error.hpp"

namespace guardrail {

namespace {

constexpr std::array<std::string_view, 7> kWeekdayNames = {"sun", "mon", "tue", "wed",
                                                           "thu", "fri", "sat"};

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) {
    fail(ErrorKind::invalid_argument, "invalid calendar date " + std::to_string(year) + "-" +
                                          std::to_string(month) + "-" + std::to_string(day));
  }
  days_ = std::chrono::sys_days{ymd};
}

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto y = text.substr(0, 4), m = text.substr(5, 2), d = text.substr(8, 2);
  if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{to_int(y)},
                                  std::chrono::month{static_cast<unsigned>(to_int(m))},
                                  std::chrono::day{static_cast<unsigned>(to_int(d))}};
  if (!ymd.ok()) return std::nullopt;
  return Date{std::chrono::sys_days{ymd}};
}

Date Date::parse_or_throw(std::string_view text) {
  auto d = parse(text);
  if (!d) fail(ErrorKind::invalid_input, "not an ISO-8601 date: '" + std::string(text) + "'");
  return *d;
}

std::string Date::iso() const {
  auto ymd = this->ymd();
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::optional<std::chrono::weekday> parse_weekday(std::string_view name) {
  if (name.size() < 3) return std::nullopt;
  std::string prefix;
  for (char c : name.substr(0, 3)) prefix += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (unsigned i = 0; i < kWeekdayNames.size(); ++i) {
    if (kWeekdayNames[i] == prefix) return std::chrono::weekday{i};
  }
  return std::nullopt;
}

std::string weekday_name(std::chrono::weekday wd) {
  return std::string(kWeekdayNames[wd.c_encoding()]);
}

}  // namespace guardrail
