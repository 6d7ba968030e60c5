#include "linkclimate/util/dates.hpp"

#include <charconv>
#include <cstdio>

namespace linkclimate::util {

namespace {

bool readInt(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i)
    if (text[i] < '0' || text[i] > '9') return false;
  std::from_chars(text.data() + pos, text.data() + pos + len, out);
  return true;
}

std::chrono::year_month_day toYmd(const Date& d) {
  return std::chrono::year{d.year} / std::chrono::month{d.month} / std::chrono::day{d.day};
}

Date fromYmd(const std::chrono::year_month_day& ymd) {
  return Date{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
              static_cast<unsigned>(ymd.day())};
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  int y, m, d;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  if (!readInt(text, 0, 4, y) || !readInt(text, 5, 2, m) || !readInt(text, 8, 2, d))
    return std::nullopt;
  Date date{y, static_cast<unsigned>(m), static_cast<unsigned>(d)};
  if (!toYmd(date).ok()) return std::nullopt;
  return date;
}

Date Date::today() {
  auto now = std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now());
  return fromYmd(std::chrono::year_month_day{now});
}

std::string Date::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
  return buf;
}

Date Date::plusDays(long days) const {
  auto sd = std::chrono::sys_days{toYmd(*this)} + std::chrono::days{days};
  return fromYmd(std::chrono::year_month_day{sd});
}

long Date::daysSinceEpoch() const {
  return std::chrono::sys_days{toYmd(*this)}.time_since_epoch().count();
}

std::optional<std::string> normalizeDateTime(std::string_view text) {
  auto date = Date::parse(text.substr(0, 10));
  if (!date) return std::nullopt;
  if (text.size() == 10) return date->str() + "T00:00:00";
  if (text.size() != 19 || text[10] != 'T' || text[13] != ':' || text[16] != ':')
    return std::nullopt;
  int hh, mm, ss;
  if (!readInt(text, 11, 2, hh) || !readInt(text, 14, 2, mm) || !readInt(text, 17, 2, ss))
    return std::nullopt;
  if (hh > 23 || mm > 59 || ss > 59) return std::nullopt;
  return std::string(text);
}

std::optional<Date> datePart(std::string_view dateTime) {
  if (dateTime.size() < 10) return std::nullopt;
  return Date::parse(dateTime.substr(0, 10));
}

}  // namespace linkclimate::util
