#include "growth/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "growth/csv.hpp"

namespace growth {

namespace {

using nlohmann::json;

struct LineContext {
    int line;
    ValidationReport& report;

    void error(std::string rule, std::string message) {
        report.errors.push_back({line, std::move(rule), std::move(message)});
    }
    void warn(std::string rule, std::string message) {
        report.warnings.push_back({line, std::move(rule), std::move(message)});
    }
};

const char* const kJsonFields[] = {"ts",      "kind",    "user",      "duration_s",
                                   "channel", "inviter", "invite_id", "link_id"};

bool known_field(const std::string& key) {
    return std::find_if(std::begin(kJsonFields), std::end(kJsonFields),
                        [&](const char* f) { return key == f; }) != std::end(kJsonFields);
}

std::optional<std::int64_t> to_count(std::string_view s) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0)
        return std::nullopt;
    return v;
}

// Conditional-field rules shared by both formats. Presence is encoded in
// the optionals, so this runs after field extraction.
bool check_event_shape(const Event& e, LineContext& ctx) {
    bool ok = true;
    const auto forbid = [&](bool present, const char* field) {
        if (present) {
            ctx.error("field_not_allowed",
                      std::string(field) + " not allowed for kind " +
                          std::string(to_string(e.kind)));
            ok = false;
        }
    };
    switch (e.kind) {
    case EventKind::Register:
        if (!e.channel) {
            ctx.error("missing_field", "register requires channel");
            ok = false;
        }
        forbid(e.duration_s.has_value(), "duration_s");
        if (e.channel) {
            if (!is_invited(*e.channel))
                forbid(e.inviter_id.has_value(), "inviter");
            if (*e.channel != Channel::InvitedDirect)
                forbid(e.invite_id.has_value(), "invite_id");
            if (*e.channel != Channel::InvitedOpen)
                forbid(e.link_id.has_value(), "link_id");
        }
        break;
    case EventKind::Session:
        if (!e.duration_s) {
            ctx.error("missing_field", "session requires duration_s");
            ok = false;
        }
        forbid(e.channel.has_value(), "channel");
        forbid(e.inviter_id.has_value(), "inviter");
        forbid(e.invite_id.has_value(), "invite_id");
        forbid(e.link_id.has_value(), "link_id");
        break;
    case EventKind::InviteDirect:
        if (!e.invite_id) {
            ctx.error("missing_field", "invite_direct requires invite_id");
            ok = false;
        }
        forbid(e.duration_s.has_value(), "duration_s");
        forbid(e.channel.has_value(), "channel");
        forbid(e.inviter_id.has_value(), "inviter");
        forbid(e.link_id.has_value(), "link_id");
        break;
    case EventKind::LinkPublish:
        if (!e.link_id) {
            ctx.error("missing_field", "link_publish requires link_id");
            ok = false;
        }
        forbid(e.duration_s.has_value(), "duration_s");
        forbid(e.channel.has_value(), "channel");
        forbid(e.inviter_id.has_value(), "inviter");
        forbid(e.invite_id.has_value(), "invite_id");
        break;
    }
    if (e.user_id.empty()) {
        ctx.error("missing_field", "user must be non-empty");
        ok = false;
    }
    return ok;
}

std::optional<Event> parse_jsonl_line(const std::string& line, bool strict, LineContext& ctx) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        ctx.error("syntax", std::string("malformed JSON: ") + e.what());
        return std::nullopt;
    }
    if (!obj.is_object()) {
        ctx.error("syntax", "line is not a JSON object");
        return std::nullopt;
    }

    for (const auto& [key, _] : obj.items()) {
        if (!known_field(key)) {
            if (strict) {
                ctx.error("unknown_field", "unknown field: " + key);
                return std::nullopt;
            }
            ctx.warn("unknown_field", "unknown field ignored: " + key);
        }
    }

    const auto str_field = [&](const char* name) -> std::optional<std::string> {
        if (!obj.contains(name))
            return std::nullopt;
        if (!obj[name].is_string()) {
            ctx.error("bad_value", std::string(name) + " must be a string");
            return std::nullopt;
        }
        return obj[name].get<std::string>();
    };

    bool ok = true;
    Event e;

    const auto ts_s = str_field("ts");
    if (!ts_s) {
        if (!obj.contains("ts"))
            ctx.error("missing_field", "ts is required");
        ok = false;
    } else if (const auto ts = parse_timestamp(*ts_s)) {
        e.ts = *ts;
    } else {
        ctx.error("bad_value", "ts is not a valid RFC 3339 timestamp: " + *ts_s);
        ok = false;
    }

    const auto kind_s = str_field("kind");
    if (!kind_s) {
        if (!obj.contains("kind"))
            ctx.error("missing_field", "kind is required");
        ok = false;
    } else if (const auto kind = event_kind_from(*kind_s)) {
        e.kind = *kind;
    } else {
        ctx.error("unknown_kind", "unknown kind: " + *kind_s);
        ok = false;
    }

    if (const auto user = str_field("user"))
        e.user_id = *user;
    else if (!obj.contains("user")) {
        ctx.error("missing_field", "user is required");
        ok = false;
    } else
        ok = false;

    if (obj.contains("duration_s")) {
        if (obj["duration_s"].is_number_unsigned())
            e.duration_s = obj["duration_s"].get<std::int64_t>();
        else {
            ctx.error("bad_value", "duration_s must be a non-negative integer");
            ok = false;
        }
    }
    if (obj.contains("channel")) {
        if (const auto ch_s = str_field("channel")) {
            if (const auto ch = channel_from(*ch_s))
                e.channel = *ch;
            else {
                ctx.error("bad_value", "unknown channel: " + *ch_s);
                ok = false;
            }
        } else
            ok = false;
    }
    e.inviter_id = str_field("inviter");
    e.invite_id = str_field("invite_id");
    e.link_id = str_field("link_id");

    if (!ok)
        return std::nullopt;
    if (!check_event_shape(e, ctx))
        return std::nullopt;
    return e;
}

constexpr std::string_view kCsvHeader = "ts,kind,user,duration_s,channel,inviter,invite_id,link_id";

std::optional<Event> parse_csv_line(const std::string& line, LineContext& ctx) {
    const auto cells = csv::split_line(line);
    if (!cells) {
        ctx.error("syntax", "unbalanced quotes");
        return std::nullopt;
    }
    if (cells->size() != 8) {
        ctx.error("syntax", "expected 8 cells, got " + std::to_string(cells->size()));
        return std::nullopt;
    }
    const auto cell = [&](int i) -> std::optional<std::string> {
        if ((*cells)[i].empty())
            return std::nullopt;
        return (*cells)[i];
    };

    bool ok = true;
    Event e;

    if (const auto ts_s = cell(0)) {
        if (const auto ts = parse_timestamp(*ts_s))
            e.ts = *ts;
        else {
            ctx.error("bad_value", "ts is not a valid RFC 3339 timestamp: " + *ts_s);
            ok = false;
        }
    } else {
        ctx.error("missing_field", "ts is required");
        ok = false;
    }

    if (const auto kind_s = cell(1)) {
        if (const auto kind = event_kind_from(*kind_s))
            e.kind = *kind;
        else {
            ctx.error("unknown_kind", "unknown kind: " + *kind_s);
            ok = false;
        }
    } else {
        ctx.error("missing_field", "kind is required");
        ok = false;
    }

    e.user_id = cell(2).value_or("");

    if (const auto dur_s = cell(3)) {
        if (const auto dur = to_count(*dur_s))
            e.duration_s = *dur;
        else {
            ctx.error("bad_value", "duration_s must be a non-negative integer");
            ok = false;
        }
    }
    if (const auto ch_s = cell(4)) {
        if (const auto ch = channel_from(*ch_s))
            e.channel = *ch;
        else {
            ctx.error("bad_value", "unknown channel: " + *ch_s);
            ok = false;
        }
    }
    e.inviter_id = cell(5);
    e.invite_id = cell(6);
    e.link_id = cell(7);

    if (!ok)
        return std::nullopt;
    if (!check_event_shape(e, ctx))
        return std::nullopt;
    return e;
}

} // namespace

ParseResult parse_events(std::istream& in, const ParseOptions& options) {
    ParseResult result;
    std::string line;
    int line_no = 0;
    bool saw_header = false;

    struct Parsed {
        Event event;
        int line;
    };
    std::vector<Parsed> parsed;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;

        LineContext ctx{line_no, result.report};
        if (options.format == LogFormat::Csv && !saw_header) {
            saw_header = true;
            if (line != kCsvHeader) {
                ctx.error("syntax", "expected header: " + std::string(kCsvHeader));
                break;
            }
            continue;
        }

        const auto event = options.format == LogFormat::Jsonl
                               ? parse_jsonl_line(line, options.strict, ctx)
                               : parse_csv_line(line, ctx);
        if (event)
            parsed.push_back({*event, line_no});
    }

    std::stable_sort(parsed.begin(), parsed.end(),
                     [](const Parsed& a, const Parsed& b) { return a.event.ts < b.event.ts; });

    // Log-level rules run on the sorted sequence: at most one registration
    // per user, and no activity before it.
    std::unordered_set<std::string> registered;
    for (const Parsed& p : parsed) {
        LineContext ctx{p.line, result.report};
        if (p.event.kind == EventKind::Register) {
            if (!registered.insert(p.event.user_id).second)
                ctx.error("duplicate_register", "duplicate register for user " + p.event.user_id);
        } else if (!registered.contains(p.event.user_id)) {
            ctx.error("activity_before_register",
                      "activity before registration for user " + p.event.user_id);
        }
    }

    result.log.events.reserve(parsed.size());
    result.log.lines.reserve(parsed.size());
    for (Parsed& p : parsed) {
        result.log.events.push_back(std::move(p.event));
        result.log.lines.push_back(p.line);
    }
    return result;
}

UserRegistry build_registry(const EventLog& log, ValidationReport& report) {
    UserRegistry registry;
    registry.reserve(log.events.size());

    // link_id -> unique publisher user_id over the whole log; the empty
    // string marks links with more than one publisher
    std::unordered_map<std::string, std::string> link_publisher;
    for (const Event& e : log.events) {
        if (e.kind != EventKind::LinkPublish)
            continue;
        const auto [it, inserted] = link_publisher.emplace(*e.link_id, e.user_id);
        if (!inserted && it->second != e.user_id)
            it->second.clear();
    }

    // sender of each direct invitation seen so far, and the registration
    // order index of every user (log order defines "earlier")
    std::unordered_map<std::string, std::string> invite_sender;
    std::unordered_map<std::string, std::size_t> registered_at_index;

    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const Event& e = log.events[i];
        const int line = i < log.lines.size() ? log.lines[i] : 0;
        LineContext ctx{line, report};

        switch (e.kind) {
        case EventKind::InviteDirect:
            invite_sender.emplace(*e.invite_id, e.user_id);
            break;
        case EventKind::LinkPublish:
        case EventKind::Session:
            break;
        case EventKind::Register: {
            UserRecord rec;
            rec.user_id = e.user_id;
            rec.registered_at = e.ts;
            rec.channel = *e.channel;
            switch (rec.channel) {
            case Channel::InvitedDirect: {
                const auto it = e.invite_id ? invite_sender.find(*e.invite_id)
                                            : invite_sender.end();
                if (it == invite_sender.end()) {
                    ctx.warn("dangling_invite_ref",
                             "register for " + e.user_id +
                                 (e.invite_id ? " references unknown invite " + *e.invite_id
                                              : " lacks invite_id") +
                                 "; channel downgraded to organic");
                    rec.channel = Channel::Organic;
                    rec.inviter_id.reset();
                } else {
                    if (e.inviter_id && *e.inviter_id != it->second)
                        ctx.warn("inviter_mismatch",
                                 "declared inviter " + *e.inviter_id +
                                     " differs from invite sender " + it->second);
                    rec.inviter_id = it->second;
                }
                break;
            }
            case Channel::InvitedOpen: {
                if (e.inviter_id) {
                    rec.inviter_id = e.inviter_id;
                } else if (e.link_id) {
                    const auto it = link_publisher.find(*e.link_id);
                    if (it != link_publisher.end() && !it->second.empty())
                        rec.inviter_id = it->second;
                }
                // inviter must predate the joiner; drop the credit otherwise
                if (rec.inviter_id && !registered_at_index.contains(*rec.inviter_id)) {
                    ctx.warn("inviter_not_prior",
                             "inviter " + *rec.inviter_id + " not registered before " +
                                 e.user_id + "; credit dropped");
                    rec.inviter_id.reset();
                }
                break;
            }
            case Channel::Organic:
            case Channel::Paid:
                break;
            }
            registered_at_index.emplace(e.user_id, i);
            registry.emplace(rec.user_id, std::move(rec));
            break;
        }
        }
    }
    return registry;
}

std::vector<PeriodAggregate> bucketize(const EventLog& log, const UserRegistry& registry,
                                       Granularity granularity,
                                       std::int64_t active_threshold_s) {
    if (active_threshold_s <= 0)
        throw std::invalid_argument("bucketize: active threshold must be positive");
    std::vector<PeriodAggregate> out;
    if (log.events.empty())
        return out;

    const PeriodKey first = period_of(log.events.front().ts, granularity);
    const PeriodKey last = period_of(log.events.back().ts, granularity);

    struct Bucket {
        std::set<std::string> present;
        std::map<std::string, std::int64_t> session_seconds;
        std::set<std::string> registrants;
        std::set<std::string> inviters;
        std::set<std::string> publishers;
        std::int64_t registrations = 0;
        std::int64_t invites_sent = 0;
        std::int64_t links_published = 0;
        std::int64_t joins_via_link = 0;
        std::int64_t invites_accepted = 0;
    };
    std::map<PeriodKey, Bucket> buckets;

    for (const Event& e : log.events) {
        Bucket& b = buckets[period_of(e.ts, granularity)];
        b.present.insert(e.user_id);
        switch (e.kind) {
        case EventKind::Register: {
            b.registrants.insert(e.user_id);
            b.registrations += 1;
            const auto it = registry.find(e.user_id);
            const Channel channel = it != registry.end() ? it->second.channel : *e.channel;
            if (channel == Channel::InvitedOpen)
                b.joins_via_link += 1;
            else if (channel == Channel::InvitedDirect)
                b.invites_accepted += 1;
            break;
        }
        case EventKind::Session:
            b.session_seconds[e.user_id] += *e.duration_s;
            break;
        case EventKind::InviteDirect:
            b.invites_sent += 1;
            b.inviters.insert(e.user_id);
            break;
        case EventKind::LinkPublish:
            b.links_published += 1;
            b.publishers.insert(e.user_id);
            break;
        }
    }

    std::int64_t cumulative = 0;
    for (PeriodKey p = first;; p = p.successor()) {
        PeriodAggregate agg;
        agg.period = p;
        if (const auto it = buckets.find(p); it != buckets.end()) {
            const Bucket& b = it->second;
            agg.dU = std::int64_t(b.present.size());
            agg.dNU = b.registrations;
            agg.invites_sent = b.invites_sent;
            agg.spreading_users = std::int64_t(b.inviters.size());
            agg.links_published = b.links_published;
            agg.link_publishers = std::int64_t(b.publishers.size());
            agg.joins_via_link = b.joins_via_link;
            agg.invites_accepted = b.invites_accepted;
            for (const auto& [user, seconds] : b.session_seconds) {
                if (seconds <= active_threshold_s)
                    continue;
                agg.dAU += 1;
                if (b.registrants.contains(user)) {
                    agg.dNAU += 1;
                    const auto rec = registry.find(user);
                    if (rec != registry.end() && is_invited(rec->second.channel))
                        agg.dIU += 1;
                }
            }
            cumulative += b.registrations;
        }
        agg.cumulative_users = cumulative;
        out.push_back(agg);
        if (p == last)
            break;
    }
    return out;
}

void write_aggregates_csv(std::ostream& out, std::span<const PeriodAggregate> aggregates) {
    out << "period,dU,dNU,dAU,dNAU,dIU,invites_sent,spreading_users,links_published,"
           "link_publishers,joins_via_link,invites_accepted,cumulative_users\n";
    for (const PeriodAggregate& a : aggregates) {
        out << a.period.start_date() << ',' << a.dU << ',' << a.dNU << ',' << a.dAU << ','
            << a.dNAU << ',' << a.dIU << ',' << a.invites_sent << ',' << a.spreading_users << ','
            << a.links_published << ',' << a.link_publishers << ',' << a.joins_via_link << ','
            << a.invites_accepted << ',' << a.cumulative_users << '\n';
    }
}

void write_report(std::ostream& out, const ValidationReport& report) {
    for (const Issue& e : report.errors)
        out << "error: line " << e.line << ": [" << e.rule << "] " << e.message << '\n';
    for (const Issue& w : report.warnings)
        out << "warning: line " << w.line << ": [" << w.rule << "] " << w.message << '\n';
}

} // namespace growth
