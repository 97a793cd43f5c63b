#pragma once
/**
 * @file report.hpp
 * @brief Coefficient-series rendering (table/CSV/JSON) and the
 *        pre-aggregated CSV input path.
 *
 * The CSV report is round-trip stable: re-ingesting it through the
 * pre-aggregated reader reproduces identical derived columns.
 */

#include <iosfwd>
#include <span>
#include <vector>

#include "growth/ingest.hpp"
#include "growth/metrics.hpp"
#include "growth/model.hpp"

namespace growth {

enum class OutputFormat { Table, Csv, Json };
enum class RoundingMode { Percent, Raw };

/**
 * Read a pre-aggregated activity CSV: one row per period with an active
 * count, a new-active count and an invited-active count. Accepted column
 * names are xAU/xNU/xIU or dAU/dNAU/dIU, plus period_start (or period);
 * other columns are ignored, so the CSV report itself is valid input.
 *
 * Periods must be strictly increasing and contiguous at the requested
 * granularity. Since only active counts are known, dU/dNU mirror
 * dAU/dNAU in the returned aggregates.
 */
struct PreAggResult {
    std::vector<PeriodAggregate> aggregates;
    ValidationReport report;
};
PreAggResult read_pre_aggregated_csv(std::istream& in, Granularity granularity);

/**
 * Render a coefficient series.
 *
 * - Table: periods as rows; percent cells by default, raw ratios with
 *   RoundingMode::Raw; absent values render blank. Global coefficients,
 *   when present, follow as a footer.
 * - Csv: period_start,xAU,xNU,xIU, integer-percent columns for the
 *   K-factor / K-retention / K-growth trio, then full-precision ratio
 *   columns. Rows only.
 * - Json: {"rows": [...], "global": {...}} with full-precision values;
 *   absent fields are omitted.
 */
void render_series(std::ostream& out, const CoefficientSeries& series,
                   std::span<const PeriodAggregate> aggregates, OutputFormat format,
                   RoundingMode rounding);

} // namespace growth
