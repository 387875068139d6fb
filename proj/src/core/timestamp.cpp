#include "tel/timestamp.hpp"

#include <cstdio>

#include "tel/error.hpp"

namespace tel {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

struct Civil {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

// Howard Hinnant's civil_from_days.
Civil civil_from_days(std::int64_t z) noexcept {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

bool is_leap(std::int64_t y) noexcept { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) noexcept {
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return (m == 2 && is_leap(y)) ? 29 : kDays[m - 1];
}

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    int digits(std::size_t n) {
        int v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (pos_ >= s_.size() || s_[pos_] < '0' || s_[pos_] > '9') fail();
            v = v * 10 + (s_[pos_++] - '0');
        }
        return v;
    }

    void expect(char c) {
        if (pos_ >= s_.size() || s_[pos_] != c) fail();
        ++pos_;
    }

    bool done() const noexcept { return pos_ == s_.size(); }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void advance() { ++pos_; }

    [[noreturn]] void fail() const {
        throw Error(ErrorCode::UnparseableTimestamp, "not an RFC 3339 timestamp: '" + std::string(s_) + "'");
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) noexcept {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Timestamp parse_rfc3339(std::string_view text) {
    Cursor c(text);
    const int year = c.digits(4);
    c.expect('-');
    const int month = c.digits(2);
    c.expect('-');
    const int day = c.digits(2);
    if (c.peek() != 'T' && c.peek() != 't') c.fail();
    c.advance();
    const int hour = c.digits(2);
    c.expect(':');
    const int minute = c.digits(2);
    c.expect(':');
    const int second = c.digits(2);
    if (c.peek() == '.') {
        c.advance();
        c.digits(1);
        while (c.peek() >= '0' && c.peek() <= '9') c.advance();
    }
    int offset_seconds = 0;
    if (c.peek() == 'Z' || c.peek() == 'z') {
        c.advance();
    } else if (c.peek() == '+' || c.peek() == '-') {
        const int sign = c.peek() == '-' ? -1 : 1;
        c.advance();
        const int oh = c.digits(2);
        c.expect(':');
        const int om = c.digits(2);
        if (oh > 23 || om > 59) c.fail();
        offset_seconds = sign * (oh * 3600 + om * 60);
    } else {
        c.fail();
    }
    if (!c.done()) c.fail();
    if (month < 1 || month > 12 || day < 1 ||
        static_cast<unsigned>(day) > days_in_month(year, static_cast<unsigned>(month)) || hour > 23 ||
        minute > 59 || second > 59) {
        c.fail();
    }
    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    return Timestamp{days * kSecondsPerDay + hour * 3600 + minute * 60 + second - offset_seconds};
}

std::string format_rfc3339(Timestamp t) {
    const std::int64_t days = floor_div(t.epoch_seconds, kSecondsPerDay);
    const std::int64_t rem = t.epoch_seconds - days * kSecondsPerDay;
    const Civil civil = civil_from_days(days);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(civil.year),
                  civil.month, civil.day, static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::string normalize_rfc3339(std::string_view text) { return format_rfc3339(parse_rfc3339(text)); }

int hour_of_day(Timestamp t) noexcept {
    const std::int64_t rem = t.epoch_seconds - floor_div(t.epoch_seconds, kSecondsPerDay) * kSecondsPerDay;
    return static_cast<int>(rem / 3600);
}

std::int64_t days_between(Timestamp reference, Timestamp t) noexcept {
    return floor_div(t.epoch_seconds - reference.epoch_seconds, kSecondsPerDay);
}

}  // namespace tel
