#pragma once
/**
 * @file metrics.hpp
 * @brief Virality, retention and growth coefficients over period aggregates.
 *
 * Conventions shared by every function here:
 *   - inputs are non-negative integer counts; results are exact rationals;
 *   - a coefficient is absent (std::nullopt) exactly when its denominator
 *     is zero or the required predecessor period does not exist;
 *   - precondition violations (negative counts, new > total) throw
 *     std::invalid_argument — they indicate corrupt aggregates, not data
 *     that merely divides by zero.
 *
 * The authoritative per-period K-growth is the flow form
 * (active - new_active + invited_active) / prev_active, which is what the
 * reference weekly dataset publishes. The additive form
 * k_factor + k_retention is exposed separately (k_growth_sum) and is only
 * approximate because the K-factor is normalized by the current period's
 * audience while retention is normalized by the previous one.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "growth/model.hpp"
#include "growth/rate.hpp"

namespace growth {

/// Local (per-period) K-factor: invited_active / active.
std::optional<Rate> local_k_factor(std::int64_t invited_active, std::int64_t active);

/// Invitation conversion: invited_users / invitations. May exceed 1 — one
/// open link can yield many joins.
std::optional<Rate> conversion_rate(std::int64_t invited_users, std::int64_t invitations);

/// Average invitations per user: invitations / users. Feeding the count of
/// spreading users instead yields invitations per spreading user.
std::optional<Rate> invites_per_user(std::int64_t invitations, std::int64_t users);

/// Global K-factor: invitations-per-user times conversion.
Rate global_k_factor(const Rate& invites_per_user, const Rate& conversion);

/// Retention on the all-user basis: (users - new_users) / prev_users.
std::optional<Rate> local_k_retention(std::int64_t users, std::int64_t new_users,
                                      std::int64_t prev_users);

/// Retention on the active basis: (active - new_active) / prev_active.
std::optional<Rate> local_k_retention_active(std::int64_t active, std::int64_t new_active,
                                             std::int64_t prev_active);

/// Flow-form K-growth: (active - new_active + invited_active) / prev_active.
std::optional<Rate> k_growth_flow(std::int64_t active, std::int64_t new_active,
                                  std::int64_t invited_active, std::int64_t prev_active);

/// Additive K-growth approximation: k_factor + k_retention.
Rate k_growth_sum(const Rate& k_factor, const Rate& k_retention);

/// Ratio-form K-growth: active / prev_active. Equals the flow form exactly
/// when every new user arrived virally (new_active == invited_active).
std::optional<Rate> k_growth_ratio(std::int64_t active, std::int64_t prev_active);

struct GrowthParts {
    Rate retention_part; ///< (active - new_active) / prev_active
    Rate viral_part;     ///< invited_active / prev_active
};

/// Additive split of the flow-form K-growth. Both parts are normalized by
/// prev_active, so retention_part + viral_part == k_growth_flow exactly.
std::optional<GrowthParts> decompose_growth(std::int64_t active, std::int64_t new_active,
                                            std::int64_t invited_active,
                                            std::int64_t prev_active);

struct CoefficientSeries {
    std::vector<MetricsRow> rows; ///< strictly increasing periods, gap-free
    std::optional<Rate> global_k_factor;
    std::optional<Rate> global_conversion;
    std::optional<Rate> global_invites_per_user;
};

/**
 * Apply every per-period coefficient to an ordered, gap-free aggregate
 * sequence and compute the whole-span global coefficients from totals
 * (total invitations = direct invitations + published links; total invited
 * joins = direct joins + link joins).
 *
 * The first row's predecessor-dependent fields are absent. Throws
 * std::invalid_argument on out-of-order or gapped input.
 */
CoefficientSeries compute_series(std::span<const PeriodAggregate> aggregates);

} // namespace growth
