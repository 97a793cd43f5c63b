#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "growth/ingest.hpp"
#include "growth/metrics.hpp"
#include "growth/simulate.hpp"

#include "oracle.hpp"

using namespace growth;

namespace {

std::vector<PeriodAggregate> pipeline_aggregates(const testutil::GenLog& gen) {
    ValidationReport report;
    const auto registry = build_registry(gen.log, report);
    return bucketize(gen.log, registry, gen.granularity, gen.threshold);
}

// random aggregate rows satisfying every count-ordering invariant
std::vector<PeriodAggregate> random_aggregates(std::mt19937_64& rng, int n) {
    std::vector<PeriodAggregate> out(n);
    PeriodKey p = *period_from_date("2014-05-05", Granularity::Week);
    std::int64_t cumulative = 0;
    for (auto& a : out) {
        a.period = p;
        p = p.successor();
        a.dU = std::int64_t(rng() % 1000);
        a.dAU = std::int64_t(rng() % (a.dU + 1));
        a.dNU = std::int64_t(rng() % (a.dU + 1));
        a.dNAU = std::int64_t(rng() % (std::min(a.dNU, a.dAU) + 1));
        a.dIU = std::int64_t(rng() % (a.dNAU + 1));
        a.invites_sent = std::int64_t(rng() % 500);
        a.spreading_users = std::int64_t(rng() % (std::min(a.dU, a.invites_sent) + 1));
        a.links_published = std::int64_t(rng() % 100);
        a.link_publishers = std::int64_t(rng() % (std::min(a.dU, a.links_published) + 1));
        const std::int64_t invited_joins = std::int64_t(rng() % (a.dNU + 1));
        a.invites_accepted = std::int64_t(rng() % (invited_joins + 1));
        a.joins_via_link = invited_joins - a.invites_accepted;
        cumulative += a.dNU;
        a.cumulative_users = cumulative;
    }
    return out;
}

} // namespace

TEST_CASE("pipeline aggregates and rows match the brute-force oracle") {
    std::mt19937_64 rng(20140505);
    for (int iter = 0; iter < 300; ++iter) {
        const auto gen = testutil::random_log(rng);
        const auto got = pipeline_aggregates(gen);
        const auto want = testutil::oracle_aggregates(gen.log, gen.granularity, gen.threshold);

        REQUIRE(got.size() == want.size());
        const std::int64_t first_day =
            testutil::oracle_bucket_start_day(gen.log.events.front().ts, gen.granularity);
        const std::int64_t step = testutil::bucket_days(gen.granularity);
        for (std::size_t i = 0; i < got.size(); ++i) {
            CAPTURE(iter);
            CAPTURE(i);
            CHECK(got[i].period.start_day() == first_day + std::int64_t(i) * step);
            CHECK(got[i].dU == want[i].dU);
            CHECK(got[i].dNU == want[i].dNU);
            CHECK(got[i].dAU == want[i].dAU);
            CHECK(got[i].dNAU == want[i].dNAU);
            CHECK(got[i].dIU == want[i].dIU);
            CHECK(got[i].invites_sent == want[i].invites_sent);
            CHECK(got[i].spreading_users == want[i].spreading_users);
            CHECK(got[i].links_published == want[i].links_published);
            CHECK(got[i].link_publishers == want[i].link_publishers);
            CHECK(got[i].joins_via_link == want[i].joins_via_link);
            CHECK(got[i].invites_accepted == want[i].invites_accepted);
            CHECK(got[i].cumulative_users == want[i].cumulative_users);
        }

        const auto series = compute_series(got);
        REQUIRE(series.rows.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            const MetricsRow expect =
                testutil::oracle_row(want[i], i > 0 ? &want[i - 1] : nullptr);
            CAPTURE(iter);
            CAPTURE(i);
            CHECK(series.rows[i].k_factor == expect.k_factor);
            CHECK(series.rows[i].conversion == expect.conversion);
            CHECK(series.rows[i].invites_per_user == expect.invites_per_user);
            CHECK(series.rows[i].invites_per_spreading_user ==
                  expect.invites_per_spreading_user);
            CHECK(series.rows[i].k_retention == expect.k_retention);
            CHECK(series.rows[i].k_retention_active == expect.k_retention_active);
            CHECK(series.rows[i].k_growth_flow == expect.k_growth_flow);
            CHECK(series.rows[i].k_growth_sum == expect.k_growth_sum);
        }
    }
}

TEST_CASE("aggregate ordering invariants hold on random logs") {
    std::mt19937_64 rng(77);
    for (int iter = 0; iter < 200; ++iter) {
        const auto gen = testutil::random_log(rng);
        const auto aggs = pipeline_aggregates(gen);

        std::int64_t total_new = 0, total_invited_joins = 0, prev_cum = 0;
        for (const PeriodAggregate& a : aggs) {
            CHECK(a.dNAU <= a.dNU);
            CHECK(a.dNAU <= a.dAU);
            CHECK(a.dIU <= a.dNAU);
            CHECK(a.dAU <= a.dU);
            CHECK(a.spreading_users <= a.dU);
            CHECK(a.invites_accepted <= a.dNU);
            CHECK(a.joins_via_link <= a.dNU);
            CHECK(a.cumulative_users >= prev_cum);
            prev_cum = a.cumulative_users;
            total_new += a.dNU;
            total_invited_joins += a.invites_accepted + a.joins_via_link;
        }

        std::int64_t registers = 0;
        for (const Event& e : gen.log.events)
            registers += e.kind == EventKind::Register;
        CHECK(total_new == registers);
        CHECK(prev_cum == registers);

        ValidationReport report;
        const auto registry = build_registry(gen.log, report);
        std::int64_t invited_records = 0;
        for (const auto& [_, rec] : registry)
            invited_records += is_invited(rec.channel);
        CHECK(total_invited_joins == invited_records);
    }
}

TEST_CASE("same-timestamp events of distinct users commute") {
    const std::int64_t t0 = *parse_timestamp("2014-05-12T08:00:00Z");
    const std::int64_t tie = *parse_timestamp("2014-05-13T12:00:00Z");

    const auto make_log = [&](bool swapped) {
        EventLog log;
        for (int u = 0; u < 3; ++u) {
            Event reg;
            reg.ts = t0 + u;
            reg.kind = EventKind::Register;
            reg.user_id = "u" + std::to_string(u);
            reg.channel = Channel::Organic;
            log.events.push_back(reg);
        }
        std::vector<int> order{0, 1, 2};
        if (swapped)
            order = {2, 0, 1};
        for (const int u : order) {
            Event ses;
            ses.ts = tie;
            ses.kind = EventKind::Session;
            ses.user_id = "u" + std::to_string(u);
            ses.duration_s = 200 + 100 * u;
            log.events.push_back(ses);
        }
        log.lines.assign(log.events.size(), 0);
        return log;
    };

    ValidationReport report;
    const auto log_a = make_log(false);
    const auto log_b = make_log(true);
    const auto aggs_a = bucketize(log_a, build_registry(log_a, report), Granularity::Day, 300);
    const auto aggs_b = bucketize(log_b, build_registry(log_b, report), Granularity::Day, 300);
    REQUIRE(aggs_a.size() == aggs_b.size());
    for (std::size_t i = 0; i < aggs_a.size(); ++i) {
        CHECK(aggs_a[i].dU == aggs_b[i].dU);
        CHECK(aggs_a[i].dAU == aggs_b[i].dAU);
        CHECK(aggs_a[i].dNU == aggs_b[i].dNU);
    }
}

TEST_CASE("bucketizing split halves composes to the whole") {
    std::mt19937_64 rng(4242);
    for (int iter = 0; iter < 100; ++iter) {
        const auto gen = testutil::random_log(rng);
        ValidationReport report;
        const auto registry = build_registry(gen.log, report);
        const auto whole = bucketize(gen.log, registry, gen.granularity, gen.threshold);
        if (whole.size() < 2)
            continue;

        const std::size_t cut = 1 + rng() % (whole.size() - 1);
        const std::int64_t boundary = whole[cut].period.start_ts();
        EventLog half1, half2;
        for (std::size_t i = 0; i < gen.log.events.size(); ++i) {
            auto& half = gen.log.events[i].ts < boundary ? half1 : half2;
            half.events.push_back(gen.log.events[i]);
            half.lines.push_back(gen.log.lines[i]);
        }
        const auto a = bucketize(half1, registry, gen.granularity, gen.threshold);
        const auto b = bucketize(half2, registry, gen.granularity, gen.threshold);

        std::map<std::int64_t, PeriodAggregate> parts;
        for (const auto& agg : a)
            parts[agg.period.start_day()] = agg;
        for (const auto& agg : b)
            parts[agg.period.start_day()] = agg;

        const auto cumulative_at = [](const std::vector<PeriodAggregate>& half, PeriodKey p) {
            std::int64_t cum = 0;
            for (const auto& agg : half)
                if (agg.period <= p)
                    cum = agg.cumulative_users;
            return cum;
        };

        for (const PeriodAggregate& w : whole) {
            PeriodAggregate part; // zero-filled fallback for uncovered periods
            if (const auto it = parts.find(w.period.start_day()); it != parts.end())
                part = it->second;
            CAPTURE(iter);
            CHECK(w.dU == part.dU);
            CHECK(w.dNU == part.dNU);
            CHECK(w.dAU == part.dAU);
            CHECK(w.dNAU == part.dNAU);
            CHECK(w.dIU == part.dIU);
            CHECK(w.invites_sent == part.invites_sent);
            CHECK(w.spreading_users == part.spreading_users);
            CHECK(w.joins_via_link == part.joins_via_link);
            CHECK(w.invites_accepted == part.invites_accepted);
            CHECK(w.cumulative_users ==
                  cumulative_at(a, w.period) + cumulative_at(b, w.period));
        }
    }
}

TEST_CASE("growth decomposition sums exactly and the ratio form embeds") {
    std::mt19937_64 rng(99);
    for (int iter = 0; iter < 5000; ++iter) {
        const std::int64_t active = std::int64_t(rng() % 2000);
        const std::int64_t fresh = std::int64_t(rng() % (active + 1));
        const bool pure_viral = rng() % 2 == 0;
        const std::int64_t invited = pure_viral ? fresh : std::int64_t(rng() % (fresh + 1));
        const std::int64_t prev = std::int64_t(rng() % 2000);

        const auto flow = k_growth_flow(active, fresh, invited, prev);
        const auto parts = decompose_growth(active, fresh, invited, prev);
        REQUIRE(flow.has_value() == (prev != 0));
        REQUIRE(parts.has_value() == (prev != 0));
        if (!flow)
            continue;
        CHECK(parts->retention_part + parts->viral_part == *flow);
        if (pure_viral)
            CHECK(*k_growth_ratio(active, prev) == *flow);
    }
}

TEST_CASE("coefficients are invariant under integer count scaling") {
    std::mt19937_64 rng(123);
    for (int iter = 0; iter < 200; ++iter) {
        const auto aggs = random_aggregates(rng, 2 + int(rng() % 5));
        const std::int64_t c = std::array<std::int64_t, 4>{2, 3, 7, 10}[rng() % 4];

        auto scaled = aggs;
        for (auto& a : scaled) {
            a.dU *= c;
            a.dNU *= c;
            a.dAU *= c;
            a.dNAU *= c;
            a.dIU *= c;
            a.invites_sent *= c;
            a.spreading_users *= c;
            a.links_published *= c;
            a.link_publishers *= c;
            a.joins_via_link *= c;
            a.invites_accepted *= c;
            a.cumulative_users *= c;
        }

        const auto base = compute_series(aggs);
        const auto big = compute_series(scaled);
        for (std::size_t i = 0; i < base.rows.size(); ++i) {
            CHECK(base.rows[i].k_factor == big.rows[i].k_factor);
            CHECK(base.rows[i].conversion == big.rows[i].conversion);
            CHECK(base.rows[i].invites_per_user == big.rows[i].invites_per_user);
            CHECK(base.rows[i].k_retention == big.rows[i].k_retention);
            CHECK(base.rows[i].k_retention_active == big.rows[i].k_retention_active);
            CHECK(base.rows[i].k_growth_flow == big.rows[i].k_growth_flow);
            CHECK(base.rows[i].k_growth_sum == big.rows[i].k_growth_sum);
        }
        CHECK(base.global_k_factor == big.global_k_factor);
        CHECK(base.global_conversion == big.global_conversion);
        CHECK(base.global_invites_per_user == big.global_invites_per_user);
    }
}

TEST_CASE("growth flow is monotone in invited and new counts") {
    std::mt19937_64 rng(321);
    for (int iter = 0; iter < 2000; ++iter) {
        const std::int64_t active = 2 + std::int64_t(rng() % 2000);
        const std::int64_t fresh = 1 + std::int64_t(rng() % (active - 1));
        const std::int64_t invited = std::int64_t(rng() % fresh);
        const std::int64_t prev = 1 + std::int64_t(rng() % 2000);

        const Rate base = *k_growth_flow(active, fresh, invited, prev);
        CHECK(*k_growth_flow(active, fresh, invited + 1, prev) > base);
        CHECK(*k_growth_flow(active, fresh + 1, invited, prev) < base);
    }
}

TEST_CASE("cumulative acquisition never exceeds the market") {
    std::mt19937_64 rng(55);
    for (int iter = 0; iter < 400; ++iter) {
        SimParams p;
        p.k_viral = double(rng() % 3000) / 1000.0;
        p.r_retention = double(rng() % 1000) / 1000.0;
        p.market_size = 1 + std::int64_t(rng() % 1'000'000);
        p.initial_active = std::int64_t(rng() % std::uint64_t(p.market_size + 1));
        p.horizon = 1 + std::int64_t(rng() % 30);
        p.organic_per_period = std::int64_t(rng() % 100);
        if (rng() % 2)
            p.paid_schedule = {{std::int64_t(rng() % std::uint64_t(p.horizon)),
                                std::int64_t(rng() % 1000)}};
        REQUIRE(p.validate().empty());

        const auto trace = run(p);
        REQUIRE(trace.states.size() == std::size_t(p.horizon) + 1);
        std::int64_t prev_cum = 0;
        for (const SimState& s : trace.states) {
            CHECK(s.cumulative_acquired <= p.market_size);
            CHECK(s.cumulative_acquired >= prev_cum);
            CHECK(s.invited_this_period <= s.new_this_period);
            CHECK(s.new_this_period <= s.active);
            prev_cum = s.cumulative_acquired;
        }
    }
}

TEST_CASE("far from saturation the realized growth is k plus r within rounding") {
    std::mt19937_64 rng(666);
    for (int iter = 0; iter < 300; ++iter) {
        SimParams p;
        p.k_viral = double(rng() % 1500) / 1000.0;
        p.r_retention = double(rng() % 950) / 1000.0;
        p.market_size = 100'000'000'000'000'000; // 1e17 dwarfs every trajectory here
        p.initial_active = 100 + std::int64_t(rng() % 900);
        p.horizon = 1 + std::int64_t(rng() % 12);
        const auto trace = run(p);
        const auto growth = measure_k_growth(trace);
        for (std::size_t t = 1; t < trace.states.size(); ++t) {
            const std::int64_t prev = trace.states[t - 1].active;
            if (prev == 0)
                break;
            REQUIRE(growth[t - 1].has_value());
            const double eps = 2.0 / double(prev) + 1e-12;
            CHECK(std::abs(growth[t - 1]->value() - (p.k_viral + p.r_retention)) <= eps);
        }
    }
}

TEST_CASE("invited arrivals shrink monotonically with market penetration") {
    std::mt19937_64 rng(31337);
    for (int iter = 0; iter < 100; ++iter) {
        SimParams p;
        p.k_viral = double(rng() % 3000) / 1000.0;
        p.r_retention = 0.5;
        p.market_size = 10'000;
        p.horizon = 1;
        SimState s;
        s.active = 1 + std::int64_t(rng() % 500);

        std::int64_t last = INT64_MAX;
        for (std::int64_t c = s.active; c <= p.market_size; c += 500) {
            s.cumulative_acquired = c;
            const std::int64_t invited = step(s, p).invited_this_period;
            CHECK(invited <= last);
            last = invited;
        }
    }
}

TEST_CASE("decay regimes shrink monotonically and sub-half regimes die out") {
    std::mt19937_64 rng(2718);
    for (int iter = 0; iter < 200; ++iter) {
        SimParams p;
        p.k_viral = double(rng() % 1000) / 1000.0;
        p.r_retention = double(rng() % std::max<std::int64_t>(1, 999 - std::int64_t(p.k_viral * 1000))) / 1000.0;
        REQUIRE(p.k_viral + p.r_retention < 1.0);
        p.market_size = 1'000'000'000;
        p.initial_active = 1 + std::int64_t(rng() % 500);
        p.horizon = p.initial_active + 20;
        const auto trace = run(p);

        for (std::size_t t = 1; t < trace.states.size(); ++t)
            CHECK(trace.states[t].active <= trace.states[t - 1].active);

        if (p.k_viral + p.r_retention < 0.5) {
            CHECK(trace.states.back().active == 0);
        }
    }
}

TEST_CASE("growth regimes expand strictly until saturation bites") {
    std::mt19937_64 rng(1618);
    int asserted = 0;
    for (int iter = 0; iter < 200; ++iter) {
        SimParams p;
        do {
            p.k_viral = 0.2 + double(rng() % 1800) / 1000.0;
            p.r_retention = double(rng() % 900) / 1000.0;
        } while (p.k_viral + p.r_retention < 1.1);
        p.market_size = 10'000'000;
        p.initial_active = 100 + std::int64_t(rng() % 900);
        p.horizon = 40;
        const auto trace = run(p);

        for (std::size_t t = 0; t + 1 < trace.states.size(); ++t) {
            const SimState& s = trace.states[t];
            if (s.active <= 0 || s.cumulative_acquired * 2 >= p.market_size)
                continue;
            const double damp = 1.0 - double(s.cumulative_acquired) / double(p.market_size);
            const double needed =
                (1.0 - p.r_retention + 1.0 / double(s.active)) / p.k_viral;
            if (damp > needed + 1e-9) {
                CHECK(trace.states[t + 1].active > s.active);
                ++asserted;
            }
        }
    }
    CHECK(asserted > 1000); // the regime condition actually fired
}

TEST_CASE("simulated traces feed back through the metrics series exactly") {
    std::mt19937_64 rng(911);
    for (int iter = 0; iter < 100; ++iter) {
        SimParams p;
        p.k_viral = double(rng() % 2000) / 1000.0;
        p.r_retention = double(rng() % 1000) / 1000.0;
        p.market_size = 1 + std::int64_t(rng() % 100'000);
        p.initial_active = std::int64_t(rng() % std::uint64_t(p.market_size + 1));
        p.horizon = 1 + std::int64_t(rng() % 20);
        p.organic_per_period = std::int64_t(rng() % 50);
        const auto trace = run(p);
        const auto measured = measure_k_growth(trace);

        std::vector<PeriodAggregate> aggs(trace.states.size());
        PeriodKey period = period_of(0, Granularity::Day);
        std::int64_t cumulative = 0;
        for (std::size_t i = 0; i < trace.states.size(); ++i) {
            const SimState& s = trace.states[i];
            aggs[i].period = period;
            period = period.successor();
            aggs[i].dAU = s.active;
            aggs[i].dNAU = s.new_this_period;
            aggs[i].dIU = s.invited_this_period;
            aggs[i].dU = s.active;
            aggs[i].dNU = s.new_this_period;
            cumulative += s.new_this_period;
            aggs[i].cumulative_users = cumulative;
        }
        const auto series = compute_series(aggs);
        for (std::size_t i = 1; i < series.rows.size(); ++i)
            CHECK(series.rows[i].k_growth_flow == measured[i - 1]);
    }
}
