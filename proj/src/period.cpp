#include "growth/period.hpp"

#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>

namespace growth {

namespace {

namespace chr = std::chrono;

// Days since epoch of the Monday on or before `day`. 1970-01-01 was a
// Thursday, so (day + 3) mod 7 is the offset from the preceding Monday.
std::int64_t monday_of(std::int64_t day) {
    std::int64_t off = (day + 3) % 7;
    if (off < 0)
        off += 7;
    return day - off;
}

bool parse_fixed_uint(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size())
        return false;
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        const char c = s[i];
        if (c < '0' || c > '9')
            return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

} // namespace

PeriodKey period_of(std::int64_t ts, Granularity granularity) {
    const std::int64_t day = floor_div(ts, kSecondsPerDay);
    return granularity == Granularity::Day ? PeriodKey(granularity, day)
                                           : PeriodKey(granularity, monday_of(day));
}

std::optional<PeriodKey> period_from_date(std::string_view date, Granularity granularity) {
    const auto day = parse_date(date);
    if (!day)
        return std::nullopt;
    return period_of(*day * kSecondsPerDay, granularity);
}

std::string PeriodKey::start_date() const {
    return format_date(start_day_);
}

std::string format_date(std::int64_t day) {
    const chr::year_month_day ymd{chr::sys_days{chr::days{day}}};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()));
    return buf;
}

std::optional<std::int64_t> parse_date(std::string_view s) {
    int y = 0, m = 0, d = 0;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        return std::nullopt;
    if (!parse_fixed_uint(s, 0, 4, y) || !parse_fixed_uint(s, 5, 2, m) ||
        !parse_fixed_uint(s, 8, 2, d))
        return std::nullopt;
    const chr::year_month_day ymd{chr::year{y}, chr::month{unsigned(m)}, chr::day{unsigned(d)}};
    if (!ymd.ok())
        return std::nullopt;
    return chr::sys_days{ymd}.time_since_epoch().count();
}

std::optional<std::int64_t> parse_timestamp(std::string_view s) {
    // date part
    if (s.size() < 20)
        return std::nullopt;
    const auto day = parse_date(s.substr(0, 10));
    if (!day)
        return std::nullopt;
    if (s[10] != 'T' && s[10] != 't')
        return std::nullopt;

    int hh = 0, mm = 0, ss = 0;
    if (!parse_fixed_uint(s, 11, 2, hh) || s[13] != ':' || !parse_fixed_uint(s, 14, 2, mm) ||
        s[16] != ':' || !parse_fixed_uint(s, 17, 2, ss))
        return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60)
        return std::nullopt;
    if (ss == 60)
        ss = 59; // leap seconds clamp to the end of the minute

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') { // fractional seconds: truncate
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0)
            return std::nullopt;
    }
    if (pos >= s.size())
        return std::nullopt;

    std::int64_t offset = 0;
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        const bool neg = s[pos] == '-';
        ++pos;
        int oh = 0, om = 0;
        if (!parse_fixed_uint(s, pos, 2, oh))
            return std::nullopt;
        pos += 2;
        if (pos >= s.size() || s[pos] != ':')
            return std::nullopt;
        ++pos;
        if (!parse_fixed_uint(s, pos, 2, om))
            return std::nullopt;
        pos += 2;
        if (oh > 23 || om > 59)
            return std::nullopt;
        offset = (neg ? -1 : 1) * (oh * 3600 + om * 60);
    } else {
        return std::nullopt;
    }
    if (pos != s.size())
        return std::nullopt;

    return *day * kSecondsPerDay + hh * 3600 + mm * 60 + ss - offset;
}

std::string format_timestamp(std::int64_t ts) {
    const std::int64_t day = floor_div(ts, kSecondsPerDay);
    const std::int64_t sec = ts - day * kSecondsPerDay;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(day).c_str(),
                  int(sec / 3600), int(sec / 60 % 60), int(sec % 60));
    return buf;
}

} // namespace growth
