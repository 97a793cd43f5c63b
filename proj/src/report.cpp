#include "growth/report.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "growth/csv.hpp"

namespace growth {

namespace {

std::optional<std::int64_t> to_count(const std::string& s) {
    if (s.empty())
        return std::nullopt;
    std::int64_t v = 0;
    for (const char c : s) {
        if (c < '0' || c > '9')
            return std::nullopt;
        v = v * 10 + (c - '0');
    }
    return v;
}

std::string pct_cell(const std::optional<Rate>& r) {
    return r ? std::to_string(r->percent()) : std::string();
}

std::string raw_cell(const std::optional<Rate>& r) {
    return r ? r->str() : std::string();
}

void render_table(std::ostream& out, const CoefficientSeries& series,
                  std::span<const PeriodAggregate> aggregates, RoundingMode rounding) {
    const bool percent = rounding == RoundingMode::Percent;
    const char* const headers[] = {"period",   "xAU",         "xNU",     "xIU",
                                   "K-factor", "K-retention", "K-growth"};

    std::vector<std::vector<std::string>> grid;
    grid.emplace_back(std::begin(headers), std::end(headers));
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        const MetricsRow& row = series.rows[i];
        const PeriodAggregate& agg = aggregates[i];
        const auto cell = [&](const std::optional<Rate>& r) {
            if (!r)
                return std::string();
            return percent ? std::to_string(r->percent()) + "%" : r->str();
        };
        grid.push_back({row.period.start_date(), std::to_string(agg.dAU),
                        std::to_string(agg.dNAU), std::to_string(agg.dIU), cell(row.k_factor),
                        cell(row.k_retention_active), cell(row.k_growth_flow)});
    }

    std::vector<std::size_t> widths(grid.front().size(), 0);
    for (const auto& row : grid)
        for (std::size_t c = 0; c < row.size(); ++c)
            widths[c] = std::max(widths[c], row[c].size());
    for (const auto& row : grid) {
        std::ostringstream line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c)
                line << "  ";
            line << std::setw(int(widths[c])) << (c == 0 ? std::left : std::right) << row[c];
        }
        std::string text = line.str();
        text.erase(text.find_last_not_of(' ') + 1);
        out << text << '\n';
    }

    // viral globals are only worth a footer when invitations exist at all
    if (series.global_conversion) {
        out << '\n';
        if (series.global_invites_per_user)
            out << "global invites/user: " << series.global_invites_per_user->str() << '\n';
        out << "global conversion:   " << series.global_conversion->str() << '\n';
        if (series.global_k_factor)
            out << "global K-factor:     " << series.global_k_factor->str() << '\n';
    }
}

void render_csv(std::ostream& out, const CoefficientSeries& series,
                std::span<const PeriodAggregate> aggregates) {
    out << "period_start,xAU,xNU,xIU,k_factor_pct,k_retention_pct,k_growth_pct,"
           "k_factor,conversion,invites_per_user,invites_per_spreading_user,"
           "k_retention,k_retention_active,k_growth,k_growth_sum\n";
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        const MetricsRow& row = series.rows[i];
        const PeriodAggregate& agg = aggregates[i];
        out << row.period.start_date() << ',' << agg.dAU << ',' << agg.dNAU << ',' << agg.dIU
            << ',' << pct_cell(row.k_factor) << ',' << pct_cell(row.k_retention_active) << ','
            << pct_cell(row.k_growth_flow) << ',' << raw_cell(row.k_factor) << ','
            << raw_cell(row.conversion) << ',' << raw_cell(row.invites_per_user) << ','
            << raw_cell(row.invites_per_spreading_user) << ',' << raw_cell(row.k_retention)
            << ',' << raw_cell(row.k_retention_active) << ',' << raw_cell(row.k_growth_flow)
            << ',' << raw_cell(row.k_growth_sum) << '\n';
    }
}

void render_json(std::ostream& out, const CoefficientSeries& series,
                 std::span<const PeriodAggregate> aggregates) {
    using nlohmann::json;
    json rows = json::array();
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        const MetricsRow& row = series.rows[i];
        const PeriodAggregate& agg = aggregates[i];
        json r{{"period_start", row.period.start_date()},
               {"xAU", agg.dAU},
               {"xNU", agg.dNAU},
               {"xIU", agg.dIU}};
        const auto put = [&](const char* key, const std::optional<Rate>& v) {
            if (v)
                r[key] = v->value();
        };
        put("k_factor", row.k_factor);
        put("conversion", row.conversion);
        put("invites_per_user", row.invites_per_user);
        put("invites_per_spreading_user", row.invites_per_spreading_user);
        put("k_retention", row.k_retention);
        put("k_retention_active", row.k_retention_active);
        put("k_growth", row.k_growth_flow);
        put("k_growth_sum", row.k_growth_sum);
        if (row.k_factor)
            r["k_factor_pct"] = row.k_factor->percent();
        if (row.k_retention_active)
            r["k_retention_pct"] = row.k_retention_active->percent();
        if (row.k_growth_flow)
            r["k_growth_pct"] = row.k_growth_flow->percent();
        rows.push_back(std::move(r));
    }
    json doc{{"rows", std::move(rows)}};
    json global = json::object();
    if (series.global_k_factor)
        global["k_factor"] = series.global_k_factor->value();
    if (series.global_conversion)
        global["conversion"] = series.global_conversion->value();
    if (series.global_invites_per_user)
        global["invites_per_user"] = series.global_invites_per_user->value();
    if (!global.empty())
        doc["global"] = std::move(global);
    out << doc.dump(2) << '\n';
}

} // namespace

PreAggResult read_pre_aggregated_csv(std::istream& in, Granularity granularity) {
    PreAggResult result;
    std::string line;
    int line_no = 0;

    int col_period = -1, col_active = -1, col_new = -1, col_invited = -1;
    const auto error = [&](std::string rule, std::string message) {
        result.report.errors.push_back({line_no, std::move(rule), std::move(message)});
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;

        const auto cells = csv::split_line(line);
        if (!cells) {
            error("syntax", "unbalanced quotes");
            continue;
        }

        if (col_period < 0) { // header row
            for (int i = 0; i < int(cells->size()); ++i) {
                const std::string& name = (*cells)[i];
                if (name == "period_start" || name == "period" || name == "week")
                    col_period = i;
                else if (name == "xAU" || name == "dAU")
                    col_active = i;
                else if (name == "xNU" || name == "dNAU")
                    col_new = i;
                else if (name == "xIU" || name == "dIU")
                    col_invited = i;
            }
            if (col_period < 0 || col_active < 0 || col_new < 0 || col_invited < 0) {
                error("missing_column",
                      "header must name period_start, xAU, xNU and xIU columns");
                return result;
            }
            continue;
        }

        const int max_col = std::max({col_period, col_active, col_new, col_invited});
        if (int(cells->size()) <= max_col) {
            error("syntax", "row has fewer cells than the header");
            continue;
        }
        const auto period = period_from_date((*cells)[col_period], granularity);
        if (!period) {
            error("bad_value", "unparseable period date: " + (*cells)[col_period]);
            continue;
        }
        const auto active = to_count((*cells)[col_active]);
        const auto fresh = to_count((*cells)[col_new]);
        const auto invited = to_count((*cells)[col_invited]);
        if (!active || !fresh || !invited) {
            error("bad_value", "counts must be non-negative integers");
            continue;
        }
        if (*fresh > *active || *invited > *fresh) {
            error("bad_value", "expected xIU <= xNU <= xAU");
            continue;
        }

        PeriodAggregate agg;
        agg.period = *period;
        agg.dAU = *active;
        agg.dNAU = *fresh;
        agg.dIU = *invited;
        // only active counts are known on this path
        agg.dU = *active;
        agg.dNU = *fresh;
        if (!result.aggregates.empty() &&
            agg.period != result.aggregates.back().period.successor()) {
            error("bad_value", "periods must be strictly increasing and contiguous");
            continue;
        }
        agg.cumulative_users =
            (result.aggregates.empty() ? 0 : result.aggregates.back().cumulative_users) +
            agg.dNU;
        result.aggregates.push_back(agg);
    }

    if (col_period < 0)
        error("missing_column", "input is empty");
    return result;
}

void render_series(std::ostream& out, const CoefficientSeries& series,
                   std::span<const PeriodAggregate> aggregates, OutputFormat format,
                   RoundingMode rounding) {
    switch (format) {
    case OutputFormat::Table:
        render_table(out, series, aggregates, rounding);
        break;
    case OutputFormat::Csv:
        render_csv(out, series, aggregates);
        break;
    case OutputFormat::Json:
        render_json(out, series, aggregates);
        break;
    }
}

} // namespace growth
