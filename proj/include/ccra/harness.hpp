#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ccra {

// What the value grid varies. SolvingTime keeps the scenario fixed and sweeps
// the exact solver's time budget instead.
enum class SweepVariable { NetworkSize, RequestCount, DelayRequirement, SolvingTime };

// Accepts "network_size", "request_count", "delay_requirement", "solving_time".
SweepVariable sweep_variable_from_string(const std::string& name);
std::string sweep_variable_to_string(SweepVariable v);

struct ExperimentPlan {
    SweepVariable sweep = SweepVariable::RequestCount;
    std::vector<double> values;        // nonempty grid
    int seeds = 1;                     // scenarios per grid point, >= 1
    std::vector<std::string> methods;  // wf, bb, ddql, r, cm, dm, fsa, bsa, cep
    std::string profile = "desk";      // desk | paper-default
    double bb_time_limit_s = 120.0;    // per-point budget for the exact reference
    long ddql_steps = 2000;            // training budget when ddql is listed
    bool timing = false;               // wall-clock runtimes; off keeps reports byte-stable
};

ExperimentPlan plan_from_json(const std::string& text);
std::string plan_to_json(const ExperimentPlan& plan);

struct MetricsRow {
    std::string method;
    double sweep_value = 0;
    std::uint64_t seed = 0;
    bool failed = false;  // method threw, or its output did not re-verify
    double cost_total = 0;
    std::optional<double> cost_mean;      // empty when nothing is supported
    int supported = 0;
    double supported_pct = 0;
    std::optional<double> delay_mean_ms;  // exact-mode E2E, empty when unsupported
    double runtime_ms = 0;
    std::optional<double> accuracy;       // vs the exact reference, when comparable
};

// Runs every (grid value, seed) point: generates a scenario from the profile,
// runs each listed method, re-verifies each returned solution in exact mode
// and computes the metrics. A failing method flags its row; the run continues.
// When "bb" is listed and proves optimality on a point, fully supporting
// methods on that point get an accuracy value against it.
std::vector<MetricsRow> run_experiment(const ExperimentPlan& plan);

// Trailing mean over min(i+1, window) values; the warm-up prefix averages
// whatever is available so far.
std::vector<double> moving_average(const std::vector<double>& series, int window);

// Fixed header, 6 decimal digits, rows ordered by (method, sweep, seed).
// Flagged rows keep their identity columns and leave the metrics empty.
std::string report_csv(std::vector<MetricsRow> rows);
std::string report_json(std::vector<MetricsRow> rows);
std::vector<MetricsRow> rows_from_json(const std::string& text);

}  // namespace ccra
