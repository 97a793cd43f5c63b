#include "growth/metrics.hpp"

#include <stdexcept>

namespace growth {

namespace {

void require(bool cond, const char* what) {
    if (!cond)
        throw std::invalid_argument(what);
}

std::optional<Rate> ratio(std::int64_t num, std::int64_t den) {
    if (den == 0)
        return std::nullopt;
    return Rate(num, den);
}

} // namespace

std::optional<Rate> local_k_factor(std::int64_t invited_active, std::int64_t active) {
    require(invited_active >= 0 && active >= 0, "k_factor: negative count");
    return ratio(invited_active, active);
}

std::optional<Rate> conversion_rate(std::int64_t invited_users, std::int64_t invitations) {
    require(invited_users >= 0 && invitations >= 0, "conversion: negative count");
    return ratio(invited_users, invitations);
}

std::optional<Rate> invites_per_user(std::int64_t invitations, std::int64_t users) {
    require(invitations >= 0 && users >= 0, "invites_per_user: negative count");
    return ratio(invitations, users);
}

Rate global_k_factor(const Rate& invites_per_user, const Rate& conversion) {
    return invites_per_user * conversion;
}

std::optional<Rate> local_k_retention(std::int64_t users, std::int64_t new_users,
                                      std::int64_t prev_users) {
    require(users >= 0 && new_users >= 0 && prev_users >= 0, "k_retention: negative count");
    require(new_users <= users, "k_retention: new_users > users");
    return ratio(users - new_users, prev_users);
}

std::optional<Rate> local_k_retention_active(std::int64_t active, std::int64_t new_active,
                                             std::int64_t prev_active) {
    return local_k_retention(active, new_active, prev_active);
}

std::optional<Rate> k_growth_flow(std::int64_t active, std::int64_t new_active,
                                  std::int64_t invited_active, std::int64_t prev_active) {
    require(active >= 0 && new_active >= 0 && invited_active >= 0 && prev_active >= 0,
            "k_growth: negative count");
    require(new_active <= active, "k_growth: new_active > active");
    require(invited_active <= new_active, "k_growth: invited_active > new_active");
    return ratio(active - new_active + invited_active, prev_active);
}

Rate k_growth_sum(const Rate& k_factor, const Rate& k_retention) {
    return k_factor + k_retention;
}

std::optional<Rate> k_growth_ratio(std::int64_t active, std::int64_t prev_active) {
    require(active >= 0 && prev_active >= 0, "k_growth_ratio: negative count");
    return ratio(active, prev_active);
}

std::optional<GrowthParts> decompose_growth(std::int64_t active, std::int64_t new_active,
                                            std::int64_t invited_active,
                                            std::int64_t prev_active) {
    require(active >= 0 && new_active >= 0 && invited_active >= 0 && prev_active >= 0,
            "decompose_growth: negative count");
    require(new_active <= active, "decompose_growth: new_active > active");
    require(invited_active <= new_active, "decompose_growth: invited_active > new_active");
    if (prev_active == 0)
        return std::nullopt;
    return GrowthParts{Rate(active - new_active, prev_active),
                       Rate(invited_active, prev_active)};
}

CoefficientSeries compute_series(std::span<const PeriodAggregate> aggregates) {
    for (std::size_t i = 1; i < aggregates.size(); ++i) {
        require(aggregates[i].period == aggregates[i - 1].period.successor(),
                "compute_series: aggregates must be ordered and gap-free");
    }

    CoefficientSeries series;
    series.rows.reserve(aggregates.size());

    std::int64_t total_invitations = 0;
    std::int64_t total_invited_joins = 0;

    const PeriodAggregate* prev = nullptr;
    for (const PeriodAggregate& a : aggregates) {
        MetricsRow row;
        row.period = a.period;
        row.k_factor = local_k_factor(a.dIU, a.dAU);
        row.conversion = conversion_rate(a.invites_accepted + a.joins_via_link,
                                         a.invites_sent + a.links_published);
        row.invites_per_user = invites_per_user(a.invites_sent + a.links_published, a.dU);
        row.invites_per_spreading_user = invites_per_user(a.invites_sent, a.spreading_users);
        if (prev != nullptr) {
            row.k_retention = local_k_retention(a.dU, a.dNU, prev->dU);
            row.k_retention_active = local_k_retention_active(a.dAU, a.dNAU, prev->dAU);
            row.k_growth_flow = k_growth_flow(a.dAU, a.dNAU, a.dIU, prev->dAU);
            if (row.k_factor && row.k_retention_active)
                row.k_growth_sum = k_growth_sum(*row.k_factor, *row.k_retention_active);
        }
        series.rows.push_back(std::move(row));

        total_invitations += a.invites_sent + a.links_published;
        total_invited_joins += a.invites_accepted + a.joins_via_link;
        prev = &a;
    }

    if (!aggregates.empty()) {
        const std::int64_t total_users = aggregates.back().cumulative_users;
        series.global_conversion = conversion_rate(total_invited_joins, total_invitations);
        series.global_invites_per_user = invites_per_user(total_invitations, total_users);
        if (series.global_conversion && series.global_invites_per_user)
            series.global_k_factor =
                global_k_factor(*series.global_invites_per_user, *series.global_conversion);
    }
    return series;
}

} // namespace growth
