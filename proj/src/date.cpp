#include "scinov/date.hpp"

#include <charconv>
#include <cstdio>

#include "scinov/error.hpp"

namespace scinov {

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

Date Date::from_ymd(int year, unsigned month, unsigned day) {
    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                             std::chrono::day{day}};
    if (!ymd.ok()) throw DataError("invalid calendar date");
    return Date(static_cast<std::int32_t>(sys_days{ymd}.time_since_epoch().count()));
}

Date Date::parse(std::string_view iso) {
    unsigned y = 0, m = 0, d = 0;
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' || !parse_uint(iso.substr(0, 4), y) ||
        !parse_uint(iso.substr(5, 2), m) || !parse_uint(iso.substr(8, 2), d)) {
        throw DataError("invalid date '" + std::string(iso) + "', expected YYYY-MM-DD");
    }
    try {
        return from_ymd(static_cast<int>(y), m, d);
    } catch (const DataError&) {
        throw DataError("invalid date '" + std::string(iso) + "'");
    }
}

int Date::year() const {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{std::chrono::days{days_}}};
    return static_cast<int>(ymd.year());
}

std::string Date::to_string() const {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{std::chrono::days{days_}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace scinov
