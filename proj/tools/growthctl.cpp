// growthctl — growth analytics and simulation for freemium products.
//
//   validate  check an event log and print a validation report
//   metrics   compute per-period virality/retention/growth coefficients
//   simulate  run the discrete-time growth model from a JSON config
//   gate      launch/iterate decision over a k_growth series
//
// Exit codes: 0 success (gate: LAUNCH), 1 validation or input error,
// 2 I/O failure, 3 gate decided ITERATE.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "growth/csv.hpp"
#include "growth/ingest.hpp"
#include "growth/metrics.hpp"
#include "growth/report.hpp"
#include "growth/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;
constexpr int kExitIterate = 3;

growth::LogFormat format_for(const std::string& path) {
    return path.size() >= 4 && path.substr(path.size() - 4) == ".csv" ? growth::LogFormat::Csv
                                                                      : growth::LogFormat::Jsonl;
}

bool open_input(const std::string& path, std::ifstream& file) {
    file.open(path);
    if (!file) {
        std::cerr << "error: cannot open " << path << '\n';
        return false;
    }
    return true;
}

struct MetricsOptions {
    std::string input;
    std::string bucket = "week";
    std::int64_t active_threshold = 300;
    std::string format = "table";
    std::string rounding = "percent";
    bool pre_aggregated = false;
};

int run_validate(const std::string& path) {
    std::ifstream file;
    if (!open_input(path, file))
        return kExitIo;
    const auto result = growth::parse_events(file, {format_for(path)});
    growth::write_report(std::cerr, result.report);
    if (!result.report.ok())
        return kExitInvalid;
    std::cerr << result.log.events.size() << " events ok\n";
    return kExitOk;
}

int run_metrics(const MetricsOptions& opt) {
    std::ifstream file;
    if (!open_input(opt.input, file))
        return kExitIo;

    const growth::Granularity granularity =
        opt.bucket == "day" ? growth::Granularity::Day : growth::Granularity::Week;

    std::vector<growth::PeriodAggregate> aggregates;
    if (opt.pre_aggregated) {
        auto pre = growth::read_pre_aggregated_csv(file, granularity);
        if (!pre.report.ok()) {
            growth::write_report(std::cerr, pre.report);
            return kExitInvalid;
        }
        aggregates = std::move(pre.aggregates);
    } else {
        const auto parsed = growth::parse_events(file, {format_for(opt.input)});
        growth::ValidationReport report = parsed.report;
        if (!report.ok()) {
            growth::write_report(std::cerr, report);
            return kExitInvalid;
        }
        const auto registry = growth::build_registry(parsed.log, report);
        growth::write_report(std::cerr, report);
        aggregates = growth::bucketize(parsed.log, registry, granularity, opt.active_threshold);
    }

    const auto series = growth::compute_series(aggregates);
    const growth::OutputFormat format = opt.format == "csv"    ? growth::OutputFormat::Csv
                                        : opt.format == "json" ? growth::OutputFormat::Json
                                                               : growth::OutputFormat::Table;
    const growth::RoundingMode rounding = opt.rounding == "raw" ? growth::RoundingMode::Raw
                                                                : growth::RoundingMode::Percent;
    growth::render_series(std::cout, series, aggregates, format, rounding);
    return kExitOk;
}

int run_simulate(const std::string& path, const std::string& format, int window) {
    std::ifstream file;
    if (!open_input(path, file))
        return kExitIo;
    const auto config = growth::parse_sim_config(file);
    if (!config.errors.empty()) {
        for (const std::string& e : config.errors)
            std::cerr << "error: " << e << '\n';
        return kExitInvalid;
    }

    const auto trace = growth::run(config.params);
    if (format == "json")
        growth::write_trace_json(std::cout, trace);
    else
        growth::write_trace_csv(std::cout, trace);

    const auto summary = growth::summarize(trace, config.params, window);
    std::cerr << "final active: " << summary.final_active;
    if (summary.saturation_period)
        std::cerr << ", saturated at period " << *summary.saturation_period;
    if (summary.mean_k_growth_last_window)
        std::cerr << ", mean k_growth (last " << window
                  << "): " << *summary.mean_k_growth_last_window;
    std::cerr << '\n';
    return kExitOk;
}

int run_gate(const std::string& path, int window, double threshold) {
    std::ifstream file;
    if (!open_input(path, file))
        return kExitIo;

    std::string line;
    int col = -1;
    std::vector<double> series;
    bool header_seen = false;
    while (std::getline(file, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto cells = growth::csv::split_line(line);
        if (!cells)
            continue;
        if (!header_seen) {
            header_seen = true;
            for (int i = 0; i < int(cells->size()); ++i)
                if ((*cells)[i] == "k_growth")
                    col = i;
            if (col < 0) {
                std::cerr << "error: input has no k_growth column\n";
                return kExitInvalid;
            }
            continue;
        }
        if (col < int(cells->size()) && !(*cells)[col].empty()) {
            try {
                series.push_back(std::stod((*cells)[col]));
            } catch (const std::exception&) {
                std::cerr << "error: unparseable k_growth value: " << (*cells)[col] << '\n';
                return kExitInvalid;
            }
        }
    }
    if (!header_seen) {
        std::cerr << "error: input has no k_growth column\n";
        return kExitInvalid;
    }
    if (series.empty()) {
        std::cerr << "error: no k_growth values in input\n";
        return kExitInvalid;
    }

    const auto result = growth::launch_gate(series, window, threshold);
    const bool launch = result.decision == growth::GateDecision::Launch;
    std::cout << (launch ? "LAUNCH" : "ITERATE") << " (mean k_growth over last "
              << result.window_used << " periods: " << result.windowed_mean << ")\n";
    return launch ? kExitOk : kExitIterate;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"growth analytics and simulation for freemium products"};
    app.require_subcommand(1);

    std::string validate_input;
    auto* validate = app.add_subcommand("validate", "validate an event log");
    validate->add_option("input", validate_input, "event log (.jsonl or .csv)")->required();

    MetricsOptions metrics;
    auto* metrics_cmd = app.add_subcommand("metrics", "compute growth coefficients");
    metrics_cmd->add_option("input", metrics.input, "event log or pre-aggregated CSV")
        ->required();
    metrics_cmd->add_option("--bucket", metrics.bucket, "day|week (default week)")
        ->check(CLI::IsMember({"day", "week"}));
    metrics_cmd->add_option("--active-threshold", metrics.active_threshold,
                            "seconds of session time above which a user is active");
    metrics_cmd->add_option("--format", metrics.format, "table|csv|json")
        ->check(CLI::IsMember({"table", "csv", "json"}));
    metrics_cmd->add_option("--rounding", metrics.rounding, "percent|raw")
        ->check(CLI::IsMember({"percent", "raw"}));
    metrics_cmd->add_flag("--pre-aggregated", metrics.pre_aggregated,
                          "input is a per-period xAU/xNU/xIU CSV, not raw events");

    std::string sim_input, sim_format = "csv";
    int sim_window = 4;
    auto* simulate = app.add_subcommand("simulate", "run the growth simulator");
    simulate->add_option("config", sim_input, "JSON simulation config")->required();
    simulate->add_option("--format", sim_format, "csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    simulate->add_option("--window", sim_window, "summary k_growth window (default 4)")
        ->check(CLI::PositiveNumber);

    std::string gate_input;
    int gate_window = 4;
    double gate_threshold = 1.0;
    auto* gate = app.add_subcommand("gate", "launch/iterate decision from a k_growth series");
    gate->add_option("input", gate_input, "CSV with a k_growth column")->required();
    gate->add_option("--window", gate_window, "periods to average (default 4)")
        ->check(CLI::PositiveNumber);
    gate->add_option("--threshold", gate_threshold, "launch threshold (default 1.0)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed())
            return run_validate(validate_input);
        if (metrics_cmd->parsed())
            return run_metrics(metrics);
        if (simulate->parsed())
            return run_simulate(sim_input, sim_format, sim_window);
        if (gate->parsed())
            return run_gate(gate_input, gate_window, gate_threshold);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    }
    return kExitOk;
}
