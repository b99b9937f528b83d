#include "circuloop/core/time.hpp"

#include <chrono>
#include <cstdio>

#include "circuloop/core/error.hpp"

namespace circuloop {

namespace {

namespace chr = std::chrono;

int parse_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    if (pos + len > text.size()) {
        fail(ErrorCode::Validation, "malformed date/time: " + std::string(whole));
    }
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        char c = text[i];
        if (c < '0' || c > '9') {
            fail(ErrorCode::Validation, "malformed date/time: " + std::string(whole));
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c) {
        fail(ErrorCode::Validation, "malformed date/time: " + std::string(text));
    }
}

}  // namespace

std::string Timestamp::to_iso8601() const {
    auto tp = chr::sys_time<chr::milliseconds>(chr::milliseconds(millis));
    auto day_point = chr::floor<chr::days>(tp);
    chr::year_month_day ymd{day_point};
    chr::hh_mm_ss<chr::milliseconds> tod{tp - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()), static_cast<int>(tod.subseconds().count()));
    return buf;
}

Timestamp Timestamp::parse_iso8601(std::string_view text) {
    // Accepts YYYY-MM-DDTHH:MM:SS[.mmm]Z and bare dates (midnight UTC).
    Date date = Date::parse(text.substr(0, 10));
    int h = 0, mi = 0, s = 0, ms = 0;
    if (text.size() > 10) {
        expect_char(text, 10, 'T');
        h = parse_int(text, 11, 2, text);
        expect_char(text, 13, ':');
        mi = parse_int(text, 14, 2, text);
        expect_char(text, 16, ':');
        s = parse_int(text, 17, 2, text);
        std::size_t pos = 19;
        if (pos < text.size() && text[pos] == '.') {
            ms = parse_int(text, pos + 1, 3, text);
            pos += 4;
        }
        expect_char(text, pos, 'Z');
        if (pos + 1 != text.size() || h > 23 || mi > 59 || s > 59) {
            fail(ErrorCode::Validation, "malformed timestamp: " + std::string(text));
        }
    }
    chr::sys_days days{chr::year{date.year} / chr::month{date.month} / chr::day{date.day}};
    auto tp = chr::time_point_cast<chr::milliseconds>(days) + chr::hours(h) + chr::minutes(mi) +
              chr::seconds(s) + chr::milliseconds(ms);
    return Timestamp{tp.time_since_epoch().count()};
}

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
    return buf;
}

Date Date::parse(std::string_view text) {
    if (text.size() != 10) {
        fail(ErrorCode::Validation, "malformed date: " + std::string(text));
    }
    Date d;
    d.year = parse_int(text, 0, 4, text);
    expect_char(text, 4, '-');
    d.month = static_cast<unsigned>(parse_int(text, 5, 2, text));
    expect_char(text, 7, '-');
    d.day = static_cast<unsigned>(parse_int(text, 8, 2, text));
    chr::year_month_day ymd{chr::year{d.year}, chr::month{d.month}, chr::day{d.day}};
    if (!ymd.ok()) {
        fail(ErrorCode::Validation, "invalid calendar date: " + std::string(text));
    }
    return d;
}

Clock system_clock() {
    return [] {
        auto now = chr::time_point_cast<chr::milliseconds>(chr::system_clock::now());
        return Timestamp{now.time_since_epoch().count()};
    };
}

}  // namespace circuloop
