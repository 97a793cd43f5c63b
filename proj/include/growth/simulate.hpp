#pragma once
/**
 * @file simulate.hpp
 * @brief Discrete-time user-base growth simulation with market saturation,
 *        plus the launch/iterate decision gate.
 *
 * The model is deterministic and expectation-valued: each step retains
 * round(r * active) of the previous audience and adds viral, organic and
 * paid arrivals, with viral acquisition damped linearly by remaining
 * market headroom (the logistic-growth kernel). All rounding is
 * half-away-from-zero. Total acquisition never exceeds the market size;
 * when the ceiling binds, the clamp removes viral arrivals first, then
 * organic, then paid.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "growth/rate.hpp"

namespace growth {

struct SimParams {
    double k_viral = 0.0;            ///< invited activations per active user, >= 0
    double r_retention = 0.0;        ///< fraction retained next period, in [0, 1)
    std::int64_t market_size = 0;    ///< total addressable users, > 0
    std::int64_t initial_active = 0; ///< active users at t = 0
    std::int64_t horizon = 0;        ///< number of steps, > 0
    std::int64_t organic_per_period = 0;
    /// (step index, users) injections; index j lands in state j+1.
    std::vector<std::pair<std::int64_t, std::int64_t>> paid_schedule;

    /// Empty when the parameter set is valid; otherwise one message per problem.
    std::vector<std::string> validate() const;

    std::int64_t paid_at(std::int64_t step_index) const;
};

struct SimState {
    std::int64_t t = 0;
    std::int64_t active = 0;
    std::int64_t cumulative_acquired = 0; ///< never exceeds market_size
    std::int64_t new_this_period = 0;
    std::int64_t invited_this_period = 0;
};

struct SimTrace {
    std::vector<SimState> states; ///< horizon + 1 entries, states[0] is initial
};

/// Remaining market headroom as a damping factor: 1 at zero penetration,
/// 0 at full. Linear in cumulative.
double saturation_factor(std::int64_t cumulative, std::int64_t market_size);

/// Advance one period. Requires valid params and state invariants.
SimState step(const SimState& state, const SimParams& params);

/// Run the full horizon from the initial state. Throws std::invalid_argument
/// when params.validate() is non-empty.
SimTrace run(const SimParams& params);

/// Per-period realized K-growth, (active - new + invited) / prev_active,
/// one entry per step; absent where the previous audience was zero.
std::vector<std::optional<Rate>> measure_k_growth(const SimTrace& trace);

enum class GateDecision { Launch, Iterate };

struct GateResult {
    GateDecision decision = GateDecision::Iterate;
    double windowed_mean = 0.0;
    int window_used = 0; ///< min(window, series length)
};

/// Launch iff the mean of the last min(window, length) values reaches the
/// threshold (inclusive). Requires a non-empty series and window >= 1.
GateResult launch_gate(std::span<const double> k_growth_series, int window,
                       double threshold = 1.0);

struct SimSummary {
    std::int64_t final_active = 0;
    std::optional<std::int64_t> saturation_period; ///< first t at full penetration
    std::optional<double> mean_k_growth_last_window;
};

SimSummary summarize(const SimTrace& trace, const SimParams& params, int window = 4);

/// JSON config with keys k_viral, r_retention, market_size, initial_active,
/// horizon, organic_per_period, paid_schedule ([[step, users], ...]).
/// Unknown keys are errors and are named in the returned messages.
struct SimConfigResult {
    SimParams params;
    std::vector<std::string> errors;
};
SimConfigResult parse_sim_config(std::istream& in);

/// CSV trace: t,active,new,invited,cumulative,k_growth.
void write_trace_csv(std::ostream& out, const SimTrace& trace);
void write_trace_json(std::ostream& out, const SimTrace& trace);

} // namespace growth
