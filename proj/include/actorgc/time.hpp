#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

namespace actorgc {

// UTC instant at millisecond resolution.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
// UTC calendar day.
using Day = std::chrono::sys_days;

inline constexpr double kMillisPerDay = 86'400'000.0;

inline Day day_of(Timestamp ts) { return std::chrono::floor<std::chrono::days>(ts); }

inline double to_fractional_days(std::chrono::milliseconds d) {
    return static_cast<double>(d.count()) / kMillisPerDay;
}

namespace detail {

inline bool read_int(std::string_view s, std::size_t& pos, std::size_t digits, int& out) {
    if (pos + digits > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < digits; ++i) {
        const char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    out = v;
    pos += digits;
    return true;
}

// Parses "[.fraction][Z|z|+hh:mm|-hh:mm|+hhmm]" starting at pos; empty suffix means UTC.
inline std::optional<std::pair<std::chrono::milliseconds, std::chrono::minutes>>
parse_fraction_and_offset(std::string_view s, std::size_t pos) {
    using namespace std::chrono;
    milliseconds frac{0};
    if (pos < s.size() && (s[pos] == '.' || s[pos] == ',')) {
        ++pos;
        std::size_t ndig = 0;
        long long ms = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            if (ndig < 3) ms = ms * 10 + (s[pos] - '0');
            ++ndig;
            ++pos;
        }
        if (ndig == 0) return std::nullopt;
        for (std::size_t i = ndig; i < 3; ++i) ms *= 10;
        frac = milliseconds{ms};
    }
    minutes offset{0};
    if (pos < s.size()) {
        const char c = s[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            ++pos;
            int hh = 0, mm = 0;
            if (!read_int(s, pos, 2, hh)) return std::nullopt;
            if (pos < s.size() && s[pos] == ':') ++pos;
            if (pos < s.size() && !read_int(s, pos, 2, mm)) return std::nullopt;
            if (hh > 23 || mm > 59) return std::nullopt;
            offset = minutes{hh * 60 + mm};
            if (c == '-') offset = -offset;
        } else {
            return std::nullopt;
        }
    }
    if (pos != s.size()) return std::nullopt;
    return std::make_pair(frac, offset);
}

inline std::optional<Timestamp> make_timestamp(int y, int mo, int d, int h, int mi, int sec) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) return std::nullopt;
    return time_point_cast<milliseconds>(sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec});
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

/// Parses an RFC 3339 timestamp. A space may replace the 'T' separator and a
/// missing offset is read as UTC. Fractions beyond milliseconds are truncated.
inline std::optional<Timestamp> parse_rfc3339(std::string_view text) {
    using namespace std::chrono;
    const std::string_view s = detail::trim(text);
    std::size_t pos = 0;
    int y, mo, d, h = 0, mi = 0, sec = 0;
    if (!detail::read_int(s, pos, 4, y)) return std::nullopt;
    if (pos >= s.size() || s[pos++] != '-') return std::nullopt;
    if (!detail::read_int(s, pos, 2, mo)) return std::nullopt;
    if (pos >= s.size() || s[pos++] != '-') return std::nullopt;
    if (!detail::read_int(s, pos, 2, d)) return std::nullopt;
    if (pos < s.size()) {
        if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
        ++pos;
        if (!detail::read_int(s, pos, 2, h)) return std::nullopt;
        if (pos >= s.size() || s[pos++] != ':') return std::nullopt;
        if (!detail::read_int(s, pos, 2, mi)) return std::nullopt;
        if (pos < s.size() && s[pos] == ':') {
            ++pos;
            if (!detail::read_int(s, pos, 2, sec)) return std::nullopt;
        }
    }
    const auto base = detail::make_timestamp(y, mo, d, h, mi, sec);
    if (!base) return std::nullopt;
    const auto suffix = detail::parse_fraction_and_offset(s, pos);
    if (!suffix) return std::nullopt;
    return *base + suffix->first - suffix->second;
}

/// Parses with a strftime-style format (as understood by std::get_time),
/// optionally followed by fractional seconds and a UTC offset.
inline std::optional<Timestamp> parse_with_format(std::string_view text, const std::string& format) {
    const std::string s{detail::trim(text)};
    std::tm tm{};
    tm.tm_mday = 1;
    std::istringstream in(s);
    in.imbue(std::locale::classic());
    in >> std::get_time(&tm, format.c_str());
    if (in.fail()) return std::nullopt;
    const auto consumed = in.eof() ? s.size() : static_cast<std::size_t>(in.tellg());
    const auto base = detail::make_timestamp(tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                                             tm.tm_hour, tm.tm_min, tm.tm_sec);
    if (!base) return std::nullopt;
    const auto suffix = detail::parse_fraction_and_offset(s, consumed);
    if (!suffix) return std::nullopt;
    return *base + suffix->first - suffix->second;
}

/// Empty format selects RFC 3339.
inline std::optional<Timestamp> parse_timestamp(std::string_view text, const std::string& format = {}) {
    return format.empty() ? parse_rfc3339(text) : parse_with_format(text, format);
}

// Canonical form: 2016-01-01T09:51:15.304Z
inline std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto d = floor<days>(ts);
    const year_month_day ymd{d};
    const hh_mm_ss<milliseconds> tod{ts - d};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()), static_cast<int>(tod.subseconds().count()));
    return buf;
}

inline std::string format_day(Day d) {
    using namespace std::chrono;
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

inline std::optional<Day> parse_day(std::string_view text) {
    const auto ts = parse_rfc3339(detail::trim(text));
    if (!ts || *ts != Timestamp{day_of(*ts)}) return std::nullopt;
    return day_of(*ts);
}

} // namespace actorgc
