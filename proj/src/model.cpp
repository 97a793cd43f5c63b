#include "growth/model.hpp"

namespace growth {

std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::Register: return "register";
    case EventKind::Session: return "session";
    case EventKind::InviteDirect: return "invite_direct";
    case EventKind::LinkPublish: return "link_publish";
    }
    return "?";
}

std::string_view to_string(Channel c) {
    switch (c) {
    case Channel::Organic: return "organic";
    case Channel::Paid: return "paid";
    case Channel::InvitedDirect: return "invite_direct";
    case Channel::InvitedOpen: return "invite_open";
    }
    return "?";
}

std::optional<EventKind> event_kind_from(std::string_view s) {
    if (s == "register") return EventKind::Register;
    if (s == "session") return EventKind::Session;
    if (s == "invite_direct") return EventKind::InviteDirect;
    if (s == "link_publish") return EventKind::LinkPublish;
    return std::nullopt;
}

std::optional<Channel> channel_from(std::string_view s) {
    if (s == "organic") return Channel::Organic;
    if (s == "paid") return Channel::Paid;
    if (s == "invite_direct") return Channel::InvitedDirect;
    if (s == "invite_open") return Channel::InvitedOpen;
    return std::nullopt;
}

} // namespace growth
