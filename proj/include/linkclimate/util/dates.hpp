#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace linkclimate::util {

// Calendar date without time zone, as used by CDO query parameters.
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  static std::optional<Date> parse(std::string_view text);  // YYYY-MM-DD
  static Date today();                                       // UTC

  std::string str() const;
  Date plusDays(long days) const;
  long daysSinceEpoch() const;

  friend auto operator<=>(const Date&, const Date&) = default;
};

// Normalizes a CDO date or dateTime ("2023-01-05" or "2023-01-05T00:00:00")
// to the xsd:dateTime lexical form YYYY-MM-DDTHH:MM:SS. nullopt when
// malformed or not a real calendar instant.
std::optional<std::string> normalizeDateTime(std::string_view text);

// Date part of a normalized dateTime.
std::optional<Date> datePart(std::string_view dateTime);

}  // namespace linkclimate::util
