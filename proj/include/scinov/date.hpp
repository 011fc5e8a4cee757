#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace scinov {

/// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::int32_t days) : days_(days) {}

    /// Parses `YYYY-MM-DD`; throws DataError on anything else or an invalid day.
    static Date parse(std::string_view iso);
    static Date from_ymd(int year, unsigned month, unsigned day);

    [[nodiscard]] constexpr std::int32_t days() const { return days_; }
    [[nodiscard]] int year() const;
    [[nodiscard]] std::string to_string() const;

    constexpr auto operator<=>(const Date&) const = default;

private:
    std::int32_t days_ = 0;
};

}  // namespace scinov
