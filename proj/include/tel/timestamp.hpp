#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace tel {

/// Seconds since the Unix epoch, UTC. Sub-second precision is dropped.
struct Timestamp {
    std::int64_t epoch_seconds = 0;

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Parses RFC 3339 ("2024-01-11T09:30:00Z", "2024-01-11T09:30:00.25+02:00").
/// Throws Error(UnparseableTimestamp).
Timestamp parse_rfc3339(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_rfc3339(Timestamp t);

/// Parse then re-format; the normalized form used for hashing.
std::string normalize_rfc3339(std::string_view text);

int hour_of_day(Timestamp t) noexcept;

/// floor((t - reference) / 86400 s)
std::int64_t days_between(Timestamp reference, Timestamp t) noexcept;

std::int64_t days_from_civil(std::int64_t year, unsigned month, unsigned day) noexcept;

}  // namespace tel
