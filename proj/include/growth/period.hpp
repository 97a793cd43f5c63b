#pragma once
/**
 * @file period.hpp
 * @brief Calendar time buckets (UTC days and ISO Monday-anchored weeks).
 *
 * Timestamps are UTC seconds since the Unix epoch, second precision.
 * A PeriodKey identifies one bucket by its start day; weekly buckets
 * always start on a Monday and span Monday..Sunday.
 */

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace growth {

enum class Granularity { Day, Week };

constexpr std::int64_t kSecondsPerDay = 86'400;

class PeriodKey {
public:
    PeriodKey() = default;

    Granularity granularity() const { return granularity_; }

    /// Days since 1970-01-01 of the bucket's first day.
    std::int64_t start_day() const { return start_day_; }

    /// First second of the bucket, UTC.
    std::int64_t start_ts() const { return start_day_ * kSecondsPerDay; }

    /// One past the last second of the bucket.
    std::int64_t end_ts() const { return start_ts() + length_days() * kSecondsPerDay; }

    std::int64_t length_days() const { return granularity_ == Granularity::Week ? 7 : 1; }

    PeriodKey predecessor() const { return PeriodKey(granularity_, start_day_ - length_days()); }
    PeriodKey successor() const { return PeriodKey(granularity_, start_day_ + length_days()); }

    bool contains(std::int64_t ts) const { return ts >= start_ts() && ts < end_ts(); }

    /// Bucket start date as YYYY-MM-DD.
    std::string start_date() const;

    friend bool operator==(const PeriodKey&, const PeriodKey&) = default;
    friend auto operator<=>(const PeriodKey&, const PeriodKey&) = default;

private:
    friend PeriodKey period_of(std::int64_t, Granularity);
    friend std::optional<PeriodKey> period_from_date(std::string_view, Granularity);
    PeriodKey(Granularity g, std::int64_t start_day) : granularity_(g), start_day_(start_day) {}

    Granularity granularity_ = Granularity::Day;
    std::int64_t start_day_ = 0;
};

/// The unique bucket containing ts. Total over all timestamps.
PeriodKey period_of(std::int64_t ts, Granularity granularity);

/// Bucket containing the given YYYY-MM-DD date (normalized to the bucket
/// start, i.e. the Monday for weekly buckets). Empty on a malformed date.
std::optional<PeriodKey> period_from_date(std::string_view date, Granularity granularity);

/// Floored division (round toward negative infinity).
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    const std::int64_t q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

/// Days since epoch -> YYYY-MM-DD.
std::string format_date(std::int64_t day);

/// YYYY-MM-DD -> days since epoch; empty on malformed or invalid dates.
std::optional<std::int64_t> parse_date(std::string_view s);

/// RFC 3339 timestamp ("2014-05-14T10:00:00Z", offsets and fractional
/// seconds accepted, fraction truncated) -> UTC seconds since epoch.
std::optional<std::int64_t> parse_timestamp(std::string_view s);

/// UTC seconds -> "YYYY-MM-DDThh:mm:ssZ".
std::string format_timestamp(std::int64_t ts);

} // namespace growth
