#pragma once

// Timestamp parsing. Timestamps become doubles holding epoch seconds.
// Accepted forms: ISO-8601 dates and datetimes ("2014-01-01",
// "2014-01-01T09:30:00", space separator allowed, optional fractional
// seconds, optional "Z" or "+HH:MM" offset), or plain integers/reals scaled
// by the manifest's epoch unit.

#include <optional>
#include <string_view>

namespace gime {

// Days since 1970-01-01 for a proleptic Gregorian civil date.
int64_t days_from_civil(int64_t year, unsigned month, unsigned day);

// Returns epoch seconds, or nullopt when the text is not a timestamp.
std::optional<double> parse_iso8601(std::string_view text);

// ISO-8601 first, then numeric-epoch fallback scaled by epoch_unit_seconds.
std::optional<double> parse_timestamp(std::string_view text,
                                      double epoch_unit_seconds);

}  // namespace gime
