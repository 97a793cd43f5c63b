#pragma once
/**
 * @file model.hpp
 * @brief Shared domain types: events, user records, per-period aggregates,
 *        per-period coefficient rows.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "growth/period.hpp"
#include "growth/rate.hpp"

namespace growth {

enum class EventKind { Register, Session, InviteDirect, LinkPublish };

/// Acquisition channel of a registration.
enum class Channel { Organic, Paid, InvitedDirect, InvitedOpen };

constexpr bool is_invited(Channel c) {
    return c == Channel::InvitedDirect || c == Channel::InvitedOpen;
}

std::string_view to_string(EventKind k);
std::string_view to_string(Channel c);
std::optional<EventKind> event_kind_from(std::string_view s);
std::optional<Channel> channel_from(std::string_view s);

/**
 * One timestamped user action, the atomic input.
 *
 * Conditional fields:
 *   - duration_s  present iff kind == Session
 *   - channel     present iff kind == Register
 *   - inviter_id  only on Register with an invited channel
 *   - invite_id   on InviteDirect, and on Register via direct invitation
 *   - link_id     on LinkPublish, and on Register via an open link
 */
struct Event {
    std::int64_t ts = 0;
    EventKind kind = EventKind::Register;
    std::string user_id;
    std::optional<std::int64_t> duration_s;
    std::optional<Channel> channel;
    std::optional<std::string> inviter_id;
    std::optional<std::string> invite_id;
    std::optional<std::string> link_id;
};

/// A user's registration time and acquisition channel. inviter_id, when
/// present, names a user registered strictly earlier.
struct UserRecord {
    std::string user_id;
    std::int64_t registered_at = 0;
    Channel channel = Channel::Organic;
    std::optional<std::string> inviter_id;
};

/**
 * Raw per-bucket counts. "Active" means the user's summed session time in
 * the bucket exceeds the configured threshold (strictly).
 */
struct PeriodAggregate {
    PeriodKey period;
    std::int64_t dU = 0;               ///< distinct users with any event
    std::int64_t dNU = 0;              ///< registrations
    std::int64_t dAU = 0;              ///< active users
    std::int64_t dNAU = 0;             ///< registered in bucket and active in it
    std::int64_t dIU = 0;              ///< invited-channel users in dNAU
    std::int64_t invites_sent = 0;     ///< direct invitations sent
    std::int64_t spreading_users = 0;  ///< distinct direct-invitation senders
    std::int64_t links_published = 0;  ///< open invitation links published
    std::int64_t link_publishers = 0;  ///< distinct link publishers
    std::int64_t joins_via_link = 0;   ///< registrations via open links
    std::int64_t invites_accepted = 0; ///< registrations via direct invitations
    std::int64_t cumulative_users = 0; ///< registrations up to and incl. bucket
};

/**
 * One period's derived coefficients. A field is absent exactly when its
 * denominator is zero or the period has no predecessor in the series.
 */
struct MetricsRow {
    PeriodKey period;
    std::optional<Rate> k_factor;                 ///< invited active / active
    std::optional<Rate> conversion;               ///< invited joins / invitations
    std::optional<Rate> invites_per_user;         ///< invitations / users
    std::optional<Rate> invites_per_spreading_user;
    std::optional<Rate> k_retention;              ///< all-user basis
    std::optional<Rate> k_retention_active;       ///< active basis
    std::optional<Rate> k_growth_flow;            ///< (active - new + invited) / prev active
    std::optional<Rate> k_growth_sum;             ///< k_factor + active retention
};

} // namespace growth
