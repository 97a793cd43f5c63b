#include "growth/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "growth/metrics.hpp"

namespace growth {

namespace {

std::int64_t round_half_away(double x) {
    return std::llround(x);
}

} // namespace

std::vector<std::string> SimParams::validate() const {
    std::vector<std::string> problems;
    if (!(k_viral >= 0.0) || !std::isfinite(k_viral))
        problems.push_back("k_viral must be >= 0");
    if (!(r_retention >= 0.0 && r_retention < 1.0))
        problems.push_back("r_retention must be in [0, 1)");
    if (market_size <= 0)
        problems.push_back("market_size must be > 0");
    if (initial_active < 0)
        problems.push_back("initial_active must be >= 0");
    if (initial_active > market_size)
        problems.push_back("initial_active must not exceed market_size");
    if (horizon <= 0)
        problems.push_back("horizon must be > 0");
    if (organic_per_period < 0)
        problems.push_back("organic_per_period must be >= 0");
    for (const auto& [index, users] : paid_schedule) {
        if (index < 0 || index >= horizon)
            problems.push_back("paid_schedule index " + std::to_string(index) +
                               " out of range [0, horizon)");
        if (users < 0)
            problems.push_back("paid_schedule users must be >= 0");
    }
    return problems;
}

std::int64_t SimParams::paid_at(std::int64_t step_index) const {
    std::int64_t total = 0;
    for (const auto& [index, users] : paid_schedule)
        if (index == step_index)
            total += users;
    return total;
}

double saturation_factor(std::int64_t cumulative, std::int64_t market_size) {
    if (cumulative < 0 || market_size <= 0 || cumulative > market_size)
        throw std::invalid_argument("saturation_factor: cumulative must be in [0, market_size]");
    const double factor = 1.0 - double(cumulative) / double(market_size);
    return std::max(0.0, factor);
}

SimState step(const SimState& state, const SimParams& params) {
    const double damping = saturation_factor(state.cumulative_acquired, params.market_size);
    std::int64_t viral = round_half_away(params.k_viral * double(state.active) * damping);
    std::int64_t organic = params.organic_per_period;
    std::int64_t paid = params.paid_at(state.t);

    // ceiling clamp: drop viral arrivals first, then organic, then paid
    const std::int64_t headroom = params.market_size - state.cumulative_acquired;
    std::int64_t excess = viral + organic + paid - headroom;
    if (excess > 0) {
        const std::int64_t cut_viral = std::min(viral, excess);
        viral -= cut_viral;
        excess -= cut_viral;
        const std::int64_t cut_organic = std::min(organic, excess);
        organic -= cut_organic;
        excess -= cut_organic;
        paid -= excess;
    }
    const std::int64_t inflow = viral + organic + paid;

    SimState next;
    next.t = state.t + 1;
    next.active = round_half_away(params.r_retention * double(state.active)) + inflow;
    next.cumulative_acquired = state.cumulative_acquired + inflow;
    next.new_this_period = inflow;
    next.invited_this_period = viral;
    return next;
}

SimTrace run(const SimParams& params) {
    const auto problems = params.validate();
    if (!problems.empty())
        throw std::invalid_argument("invalid simulation parameters: " + problems.front());

    SimTrace trace;
    trace.states.reserve(std::size_t(params.horizon) + 1);
    SimState state;
    state.active = params.initial_active;
    state.cumulative_acquired = params.initial_active;
    state.new_this_period = params.initial_active;
    trace.states.push_back(state);
    for (std::int64_t t = 0; t < params.horizon; ++t) {
        state = step(state, params);
        trace.states.push_back(state);
    }
    return trace;
}

std::vector<std::optional<Rate>> measure_k_growth(const SimTrace& trace) {
    std::vector<std::optional<Rate>> series;
    if (trace.states.size() < 2)
        return series;
    series.reserve(trace.states.size() - 1);
    for (std::size_t t = 1; t < trace.states.size(); ++t) {
        const SimState& cur = trace.states[t];
        const SimState& prev = trace.states[t - 1];
        series.push_back(
            k_growth_flow(cur.active, cur.new_this_period, cur.invited_this_period, prev.active));
    }
    return series;
}

GateResult launch_gate(std::span<const double> k_growth_series, int window, double threshold) {
    if (k_growth_series.empty())
        throw std::invalid_argument("launch_gate: empty series");
    if (window < 1)
        throw std::invalid_argument("launch_gate: window must be >= 1");

    const int used = std::min<std::size_t>(window, k_growth_series.size());
    const auto tail = k_growth_series.last(used);
    const double mean = std::accumulate(tail.begin(), tail.end(), 0.0) / double(used);

    GateResult result;
    result.windowed_mean = mean;
    result.window_used = used;
    result.decision = mean >= threshold ? GateDecision::Launch : GateDecision::Iterate;
    return result;
}

SimSummary summarize(const SimTrace& trace, const SimParams& params, int window) {
    SimSummary summary;
    if (trace.states.empty())
        return summary;
    summary.final_active = trace.states.back().active;
    for (const SimState& s : trace.states) {
        if (s.cumulative_acquired >= params.market_size) {
            summary.saturation_period = s.t;
            break;
        }
    }
    std::vector<double> growth;
    for (const auto& g : measure_k_growth(trace))
        if (g)
            growth.push_back(g->value());
    if (!growth.empty())
        summary.mean_k_growth_last_window =
            launch_gate(growth, window).windowed_mean;
    return summary;
}

SimConfigResult parse_sim_config(std::istream& in) {
    using nlohmann::json;
    SimConfigResult result;
    json obj;
    try {
        obj = json::parse(in);
    } catch (const json::parse_error& e) {
        result.errors.push_back(std::string("malformed config: ") + e.what());
        return result;
    }
    if (!obj.is_object()) {
        result.errors.push_back("config must be a JSON object");
        return result;
    }

    static const char* const known[] = {"k_viral",       "r_retention",
                                        "market_size",   "initial_active",
                                        "horizon",       "organic_per_period",
                                        "paid_schedule"};
    for (const auto& [key, _] : obj.items()) {
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return key == k; }) == std::end(known))
            result.errors.push_back("unknown config key: " + key);
    }

    const auto number = [&](const char* key, double& out, bool required) {
        if (!obj.contains(key)) {
            if (required)
                result.errors.push_back(std::string("missing config key: ") + key);
            return;
        }
        if (!obj[key].is_number()) {
            result.errors.push_back(std::string(key) + " must be a number");
            return;
        }
        out = obj[key].get<double>();
    };
    const auto integer = [&](const char* key, std::int64_t& out, bool required) {
        if (!obj.contains(key)) {
            if (required)
                result.errors.push_back(std::string("missing config key: ") + key);
            return;
        }
        if (!obj[key].is_number_integer()) {
            result.errors.push_back(std::string(key) + " must be an integer");
            return;
        }
        out = obj[key].get<std::int64_t>();
    };

    number("k_viral", result.params.k_viral, true);
    number("r_retention", result.params.r_retention, true);
    integer("market_size", result.params.market_size, true);
    integer("initial_active", result.params.initial_active, true);
    integer("horizon", result.params.horizon, true);
    integer("organic_per_period", result.params.organic_per_period, false);

    if (obj.contains("paid_schedule")) {
        if (!obj["paid_schedule"].is_array()) {
            result.errors.push_back("paid_schedule must be a list of [step, users] pairs");
        } else {
            for (const auto& entry : obj["paid_schedule"]) {
                if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number_integer() ||
                    !entry[1].is_number_integer()) {
                    result.errors.push_back("paid_schedule must be a list of [step, users] pairs");
                    break;
                }
                result.params.paid_schedule.emplace_back(entry[0].get<std::int64_t>(),
                                                         entry[1].get<std::int64_t>());
            }
        }
    }

    if (result.errors.empty())
        for (const std::string& problem : result.params.validate())
            result.errors.push_back(problem);
    return result;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    const auto growth = measure_k_growth(trace);
    out << "t,active,new,invited,cumulative,k_growth\n";
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        const SimState& s = trace.states[i];
        out << s.t << ',' << s.active << ',' << s.new_this_period << ','
            << s.invited_this_period << ',' << s.cumulative_acquired << ',';
        if (i > 0 && growth[i - 1])
            out << growth[i - 1]->str();
        out << '\n';
    }
}

void write_trace_json(std::ostream& out, const SimTrace& trace) {
    using nlohmann::json;
    const auto growth = measure_k_growth(trace);
    json rows = json::array();
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
        const SimState& s = trace.states[i];
        json row{{"t", s.t},
                 {"active", s.active},
                 {"new", s.new_this_period},
                 {"invited", s.invited_this_period},
                 {"cumulative", s.cumulative_acquired}};
        if (i > 0 && growth[i - 1])
            row["k_growth"] = growth[i - 1]->value();
        rows.push_back(std::move(row));
    }
    out << rows.dump(2) << '\n';
}

} // namespace growth
