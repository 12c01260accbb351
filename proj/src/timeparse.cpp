#include "gime/timeparse.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>

namespace gime {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::optional<int> parse_int_field(std::string_view s) {
  if (!all_digits(s)) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

int64_t days_from_civil(int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

std::optional<double> parse_iso8601(std::string_view text) {
  // Date part: YYYY-MM-DD
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto year = parse_int_field(text.substr(0, 4));
  auto month = parse_int_field(text.substr(5, 2));
  auto day = parse_int_field(text.substr(8, 2));
  if (!year || !month || !day) return std::nullopt;
  if (*month < 1 || *month > 12 || *day < 1 || *day > 31) return std::nullopt;

  double seconds =
      static_cast<double>(days_from_civil(*year, static_cast<unsigned>(*month),
                                          static_cast<unsigned>(*day))) *
      86400.0;
  std::string_view rest = text.substr(10);
  if (rest.empty()) return seconds;

  if (rest[0] != 'T' && rest[0] != ' ') return std::nullopt;
  rest.remove_prefix(1);
  // Time part: HH:MM[:SS[.frac]]
  if (rest.size() < 5 || rest[2] != ':') return std::nullopt;
  auto hour = parse_int_field(rest.substr(0, 2));
  auto minute = parse_int_field(rest.substr(3, 2));
  if (!hour || !minute || *hour > 23 || *minute > 59) return std::nullopt;
  seconds += *hour * 3600.0 + *minute * 60.0;
  rest.remove_prefix(5);

  if (!rest.empty() && rest[0] == ':') {
    if (rest.size() < 3) return std::nullopt;
    auto sec = parse_int_field(rest.substr(1, 2));
    if (!sec || *sec > 60) return std::nullopt;
    seconds += *sec;
    rest.remove_prefix(3);
    if (!rest.empty() && rest[0] == '.') {
      size_t i = 1;
      double scale = 0.1;
      double frac = 0.0;
      while (i < rest.size() &&
             std::isdigit(static_cast<unsigned char>(rest[i]))) {
        frac += (rest[i] - '0') * scale;
        scale *= 0.1;
        ++i;
      }
      if (i == 1) return std::nullopt;
      seconds += frac;
      rest.remove_prefix(i);
    }
  }

  if (rest.empty()) return seconds;
  if (rest == "Z") return seconds;
  if ((rest[0] == '+' || rest[0] == '-') && rest.size() == 6 && rest[3] == ':') {
    auto oh = parse_int_field(rest.substr(1, 2));
    auto om = parse_int_field(rest.substr(4, 2));
    if (!oh || !om) return std::nullopt;
    const double offset = *oh * 3600.0 + *om * 60.0;
    return rest[0] == '+' ? seconds - offset : seconds + offset;
  }
  return std::nullopt;
}

std::optional<double> parse_timestamp(std::string_view text,
                                      double epoch_unit_seconds) {
  if (auto iso = parse_iso8601(text)) return iso;
  if (text.empty()) return std::nullopt;
  // Numeric epoch, scaled by the manifest's epoch unit.
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value * epoch_unit_seconds;
}

}  // namespace gime
