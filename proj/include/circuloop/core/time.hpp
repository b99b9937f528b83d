#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace circuloop {

/// UTC instant with millisecond precision.
struct Timestamp {
    std::int64_t millis = 0;

    auto operator<=>(const Timestamp&) const = default;

    /// "2025-06-01T09:30:00.000Z"
    std::string to_iso8601() const;
    static Timestamp parse_iso8601(std::string_view text);

    static Timestamp from_hours(double hours) {
        return Timestamp{static_cast<std::int64_t>(hours * 3600.0 * 1000.0)};
    }
};

inline double hours_between(Timestamp from, Timestamp to) {
    return static_cast<double>(to.millis - from.millis) / 3'600'000.0;
}

/// Calendar date without time zone (used for expiry dates).
struct Date {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    auto operator<=>(const Date&) const = default;

    std::string to_string() const;
    static Date parse(std::string_view text);
};

using Clock = std::function<Timestamp()>;

Clock system_clock();

/// Deterministic clock for fixtures and tests; advances only when told to.
class ManualClock {
public:
    explicit ManualClock(Timestamp start = Timestamp::parse_iso8601("2025-06-01T08:00:00.000Z"))
        : now_(start) {}

    Timestamp now() const { return now_; }
    void advance_ms(std::int64_t ms) { now_.millis += ms; }
    void advance_hours(double hours) { now_.millis += Timestamp::from_hours(hours).millis; }
    void set(Timestamp t) { now_ = t; }

    Clock as_clock() {
        return [this] { return now_; };
    }

private:
    Timestamp now_;
};

}  // namespace circuloop
