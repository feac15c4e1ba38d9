#pragma once

#include "solarcast/error.hpp"

#include <chrono>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace solarcast {

/// UTC instant with one-second resolution, counted from the Unix epoch.
class Timestamp {
public:
    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t unix_seconds) : seconds_(unix_seconds) {}
    constexpr explicit Timestamp(std::chrono::sys_seconds tp) : seconds_(tp.time_since_epoch().count()) {}

    static Timestamp from_civil(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                                int second = 0) {
        using namespace std::chrono;
        const year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
        if (!ymd.ok()) throw Error(ErrorKind::parse, "invalid calendar date");
        const auto secs = sys_days{ymd}.time_since_epoch() + hours{hour} + minutes{minute} + seconds{second};
        return Timestamp{duration_cast<seconds>(secs).count()};
    }

    constexpr std::int64_t unix_seconds() const noexcept { return seconds_; }
    constexpr std::chrono::sys_seconds time_point() const noexcept {
        return std::chrono::sys_seconds{std::chrono::seconds{seconds_}};
    }

    std::chrono::year_month_day date() const noexcept {
        return std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(time_point())};
    }
    int year() const noexcept { return static_cast<int>(date().year()); }

    /// 1 on January 1st.
    int day_of_year() const noexcept {
        using namespace std::chrono;
        const auto today = floor<days>(time_point());
        const sys_days jan1{date().year() / January / 1};
        return static_cast<int>((today - jan1).count()) + 1;
    }

    /// Seconds elapsed since 00:00:00 UTC of the same day.
    std::int64_t second_of_day() const noexcept {
        const auto today = std::chrono::floor<std::chrono::days>(time_point());
        return (time_point() - today).count();
    }

    constexpr Timestamp operator+(std::int64_t seconds) const noexcept { return Timestamp{seconds_ + seconds}; }
    constexpr std::int64_t operator-(Timestamp other) const noexcept { return seconds_ - other.seconds_; }
    constexpr auto operator<=>(const Timestamp&) const = default;

    /// `YYYY-MM-DDThh:mm:ssZ`
    std::string iso8601() const {
        const auto ymd = date();
        const auto sod = second_of_day();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                      static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                      static_cast<int>(sod / 3600), static_cast<int>(sod / 60 % 60), static_cast<int>(sod % 60));
        return buf;
    }

    /// Parses `YYYY-MM-DDThh:mm:ssZ`. Throws ErrorKind::parse on anything else.
    static Timestamp parse_iso8601(std::string_view text) {
        auto bad = [&] { return Error(ErrorKind::parse, "malformed timestamp '" + std::string(text) + "'"); };
        if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
            text[16] != ':' || text[19] != 'Z')
            throw bad();
        auto digits = [&](std::size_t pos, std::size_t len) {
            int v = 0;
            for (std::size_t i = pos; i < pos + len; ++i) {
                if (text[i] < '0' || text[i] > '9') throw bad();
                v = v * 10 + (text[i] - '0');
            }
            return v;
        };
        const int y = digits(0, 4), mo = digits(5, 2), d = digits(8, 2);
        const int h = digits(11, 2), mi = digits(14, 2), s = digits(17, 2);
        if (h > 23 || mi > 59 || s > 59) throw bad();
        const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(mo)},
                                              std::chrono::day{static_cast<unsigned>(d)}};
        if (!ymd.ok()) throw bad();
        return from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d), h, mi, s);
    }

private:
    std::int64_t seconds_ = 0;
};

} // namespace solarcast
