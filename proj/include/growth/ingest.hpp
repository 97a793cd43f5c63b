#pragma once
/**
 * @file ingest.hpp
 * @brief Event-log parsing, validation, channel attribution and bucketing.
 *
 * Input formats:
 *   - JSONL: one object per line with fields ts (RFC 3339), kind, user and,
 *     depending on kind: duration_s, channel, inviter, invite_id, link_id.
 *   - CSV: header "ts,kind,user,duration_s,channel,inviter,invite_id,link_id",
 *     empty cells mean absent.
 *
 * A log is accepted iff the validation report carries no errors. Warnings
 * (unknown fields outside strict mode, dangling direct-invite references)
 * do not reject the log.
 */

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "growth/model.hpp"

namespace growth {

/// Events sorted by timestamp, stable on ties by input order. `lines`
/// carries the 1-based source line of each event for diagnostics.
struct EventLog {
    std::vector<Event> events;
    std::vector<int> lines;
};

struct Issue {
    int line = 0;
    std::string rule;
    std::string message;
};

struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;
    bool ok() const { return errors.empty(); }
};

enum class LogFormat { Jsonl, Csv };

struct ParseOptions {
    LogFormat format = LogFormat::Jsonl;
    bool strict = false; ///< reject unknown fields instead of warning
};

struct ParseResult {
    EventLog log; ///< meaningful only when report.ok()
    ValidationReport report;
};

/// Parse and validate an event log. On failure the report names every
/// offending line; the log still contains whatever parsed cleanly.
ParseResult parse_events(std::istream& in, const ParseOptions& options = {});

using UserRegistry = std::unordered_map<std::string, UserRecord>;

/**
 * Build one UserRecord per registered user from a validated log.
 *
 * Direct-invite registrations resolve their inviter from the sender of the
 * matching earlier invitation; a missing or unmatched invite_id downgrades
 * the channel to Organic and appends a warning. Open-link registrations
 * keep their channel either way; the inviter is credited only when exactly
 * one user published that link and registered before the joiner.
 */
UserRegistry build_registry(const EventLog& log, ValidationReport& report);

/**
 * One aggregate per period from the first event's period to the last's,
 * inclusive, with zero-filled gaps. A user is active in a period iff the
 * sum of their session durations within it strictly exceeds
 * active_threshold_s. Invited counts use the registry's (post-downgrade)
 * channels. Empty log -> empty sequence.
 */
std::vector<PeriodAggregate> bucketize(const EventLog& log, const UserRegistry& registry,
                                       Granularity granularity,
                                       std::int64_t active_threshold_s = 300);

/// CSV with one row per period, columns named after the aggregate fields.
void write_aggregates_csv(std::ostream& out, std::span<const PeriodAggregate> aggregates);

/// One line per issue: "line N: [rule] message".
void write_report(std::ostream& out, const ValidationReport& report);

} // namespace growth
