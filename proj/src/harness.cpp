#include "ccra/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "ccra/allocation.hpp"
#include "ccra/baselines.hpp"
#include "ccra/bb.hpp"
#include "ccra/ddql.hpp"
#include "ccra/generator.hpp"
#include "ccra/wf.hpp"

namespace ccra {

namespace {

const std::vector<std::string> kKnownMethods = {"wf", "bb",  "ddql", "r",  "cm",
                                                "dm", "fsa", "bsa",  "cep"};

bool method_known(const std::string& m) {
    return std::find(kKnownMethods.begin(), kKnownMethods.end(), m) != kKnownMethods.end();
}

GeneratorConfig profile_config(const std::string& profile) {
    if (profile == "desk") return desk_config();
    if (profile == "paper-default") return paper_default_config();
    throw std::invalid_argument("unknown profile: " + profile);
}

void validate(const ExperimentPlan& plan) {
    if (plan.values.empty()) throw std::invalid_argument("empty value grid");
    if (plan.seeds < 1) throw std::invalid_argument("seeds must be >= 1");
    if (plan.methods.empty()) throw std::invalid_argument("empty methods list");
    for (const auto& m : plan.methods)
        if (!method_known(m)) throw std::invalid_argument("unknown method: " + m);
    (void)profile_config(plan.profile);
}

// What one method hands back before metrics are computed.
struct MethodOutput {
    Solution sol;
    bool ok = true;  // false: exception or failed re-verification
};

Solution ddql_point(const Scenario& s, long steps, std::uint64_t seed) {
    TrainConfig cfg;
    cfg.steps = steps;
    cfg.learning_rate = 1e-3;  // desk-scale nets want a hotter rate than paper scale
    cfg.eps_auto = true;
    cfg.hidden = {64, 64};
    Solution merged;
    for (const auto& svc : s.services) {
        bool any = false;
        for (const auto& r : s.requests) any = any || r.service == svc.id;
        if (!any) continue;
        Environment env(s, svc.id, cfg.v_limit, cfg.p_limit);
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL +
                            static_cast<std::uint64_t>(svc.id) + 1);
        auto chain = AgentChain::make(env, cfg, rng);
        train(env, chain, cfg, rng);
        env.reset();
        auto dec = decide(env, chain, cfg);
        for (const auto& [rid, a] : dec.solution.assignments) merged.assignments[rid] = a;
        for (const auto& vn : dec.solution.vnf_at) merged.vnf_at.insert(vn);
    }
    return merged;
}

MethodOutput run_method(const Scenario& s, const std::string& method, std::uint64_t seed,
                        long ddql_steps, const BBResult* bb_ref) {
    MethodOutput out;
    try {
        if (method == "wf") {
            out.sol = wf_solve(s).solution;
        } else if (method == "bb") {
            // the reference run is shared; an infeasibility certificate is a
            // valid (empty) answer, not a failure
            if (bb_ref && bb_ref->incumbent) out.sol = *bb_ref->incumbent;
        } else if (method == "ddql") {
            out.sol = ddql_point(s, ddql_steps, seed);
        } else {
            out.sol = baseline_solve(s, baseline_kind_from_string(method), seed).solution;
        }
    } catch (const std::exception&) {
        out.ok = false;
        return out;
    }
    // never trust a solver: the row only counts if the allocation re-verifies
    if (!check_feasibility(s, out.sol, DelayMode::Exact).feasible) out.ok = false;
    return out;
}

std::string fmt6(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", x);
    return buf;
}

// keep the JSON mirror numerically identical to the CSV text
double round6(double x) { return std::stod(fmt6(x)); }

void sort_rows(std::vector<MetricsRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
        return std::tie(a.method, a.sweep_value, a.seed) <
               std::tie(b.method, b.sweep_value, b.seed);
    });
}

}  // namespace

SweepVariable sweep_variable_from_string(const std::string& name) {
    if (name == "network_size") return SweepVariable::NetworkSize;
    if (name == "request_count") return SweepVariable::RequestCount;
    if (name == "delay_requirement") return SweepVariable::DelayRequirement;
    if (name == "solving_time") return SweepVariable::SolvingTime;
    throw std::invalid_argument("unknown sweep variable: " + name);
}

std::string sweep_variable_to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::NetworkSize: return "network_size";
        case SweepVariable::RequestCount: return "request_count";
        case SweepVariable::DelayRequirement: return "delay_requirement";
        case SweepVariable::SolvingTime: return "solving_time";
    }
    throw std::invalid_argument("unknown sweep variable");
}

ExperimentPlan plan_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ExperimentPlan plan;
    plan.sweep = sweep_variable_from_string(j.at("sweep").get<std::string>());
    plan.values = j.at("values").get<std::vector<double>>();
    plan.seeds = j.at("seeds").get<int>();
    plan.methods = j.at("methods").get<std::vector<std::string>>();
    if (j.contains("profile")) plan.profile = j.at("profile").get<std::string>();
    if (j.contains("bb_time_limit_s")) plan.bb_time_limit_s = j.at("bb_time_limit_s").get<double>();
    if (j.contains("ddql_steps")) plan.ddql_steps = j.at("ddql_steps").get<long>();
    if (j.contains("timing")) plan.timing = j.at("timing").get<bool>();
    validate(plan);
    return plan;
}

std::string plan_to_json(const ExperimentPlan& plan) {
    nlohmann::ordered_json j;
    j["sweep"] = sweep_variable_to_string(plan.sweep);
    j["values"] = plan.values;
    j["seeds"] = plan.seeds;
    j["methods"] = plan.methods;
    j["profile"] = plan.profile;
    j["bb_time_limit_s"] = plan.bb_time_limit_s;
    j["ddql_steps"] = plan.ddql_steps;
    j["timing"] = plan.timing;
    return j.dump(2) + "\n";
}

std::vector<MetricsRow> run_experiment(const ExperimentPlan& plan) {
    validate(plan);
    const bool has_bb =
        std::find(plan.methods.begin(), plan.methods.end(), "bb") != plan.methods.end();
    std::vector<MetricsRow> rows;

    for (double value : plan.values) {
        auto cfg = profile_config(plan.profile);
        double bb_budget = plan.bb_time_limit_s;
        switch (plan.sweep) {
            case SweepVariable::NetworkSize:
                cfg.node_count = static_cast<int>(std::lround(value));
                break;
            case SweepVariable::RequestCount:
                cfg.request_count = static_cast<int>(std::lround(value));
                break;
            case SweepVariable::DelayRequirement:
                cfg.delay_req_range = {value, value};
                break;
            case SweepVariable::SolvingTime:
                bb_budget = value;
                break;
        }

        for (int si = 0; si < plan.seeds; ++si) {
            const auto seed = static_cast<std::uint64_t>(si);
            const auto s = generate_scenario(cfg, seed);

            // exact reference, warm-started from the greedy pass when that
            // pass supports every request (partial support cannot seed the
            // full-support incumbent)
            BBResult bb_ref;
            if (has_bb) {
                BBConfig bc;
                bc.time_limit_s = bb_budget;
                auto wf = wf_solve(s);
                if (wf.rejected.empty()) {
                    bc.warm_solution = wf.solution;
                    bc.warm_cost = wf.cost;
                }
                bb_ref = bb_solve(s, bc);
            }
            const bool ref_exact = has_bb && bb_ref.status == BBStatus::Optimal;

            for (const auto& method : plan.methods) {
                const auto t0 = std::chrono::steady_clock::now();
                auto out = run_method(s, method, seed, plan.ddql_steps, &bb_ref);
                const auto t1 = std::chrono::steady_clock::now();

                MetricsRow row;
                row.method = method;
                row.sweep_value = value;
                row.seed = seed;
                if (plan.timing)
                    row.runtime_ms =
                        std::chrono::duration<double, std::milli>(t1 - t0).count();
                if (!out.ok) {
                    row.failed = true;
                    rows.push_back(row);
                    continue;
                }
                row.supported = static_cast<int>(out.sol.assignments.size());
                row.supported_pct =
                    100.0 * row.supported / static_cast<double>(s.requests.size());
                row.cost_total = objective(s, out.sol);
                if (row.supported > 0) {
                    row.cost_mean = row.cost_total / row.supported;
                    double delay_sum = 0;
                    for (const auto& [rid, a] : out.sol.assignments)
                        delay_sum += e2e_delay(s, out.sol, rid, DelayMode::Exact).total;
                    row.delay_mean_ms = 1000.0 * delay_sum / row.supported;
                }
                if (ref_exact && row.supported == static_cast<int>(s.requests.size()))
                    row.accuracy = accuracy(std::max(row.cost_total, bb_ref.cost), bb_ref.cost);
                rows.push_back(row);
            }
        }
    }
    sort_rows(rows);
    return rows;
}

std::vector<double> moving_average(const std::vector<double>& series, int window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    std::vector<double> out;
    out.reserve(series.size());
    double sum = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (i >= static_cast<std::size_t>(window)) sum -= series[i - static_cast<std::size_t>(window)];
        const auto n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
        out.push_back(sum / static_cast<double>(n));
    }
    return out;
}

std::string report_csv(std::vector<MetricsRow> rows) {
    sort_rows(rows);
    std::string out = "method,sweep,seed,cost_total,cost_mean,supported,supported_pct,"
                      "delay_mean_ms,runtime_ms,accuracy\n";
    for (const auto& r : rows) {
        out += r.method + ',' + fmt6(r.sweep_value) + ',' + std::to_string(r.seed) + ',';
        if (r.failed) {
            out += ",,0,,,";
            out += fmt6(r.runtime_ms) + ",\n";
            continue;
        }
        out += fmt6(r.cost_total) + ',';
        out += (r.cost_mean ? fmt6(*r.cost_mean) : std::string()) + ',';
        out += std::to_string(r.supported) + ',' + fmt6(r.supported_pct) + ',';
        out += (r.delay_mean_ms ? fmt6(*r.delay_mean_ms) : std::string()) + ',';
        out += fmt6(r.runtime_ms) + ',';
        out += (r.accuracy ? fmt6(*r.accuracy) : std::string()) + '\n';
    }
    return out;
}

std::string report_json(std::vector<MetricsRow> rows) {
    sort_rows(rows);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["method"] = r.method;
        j["sweep"] = round6(r.sweep_value);
        j["seed"] = r.seed;
        j["failed"] = r.failed;
        if (r.failed) {
            j["cost_total"] = nullptr;
            j["cost_mean"] = nullptr;
            j["supported"] = 0;
            j["supported_pct"] = nullptr;
            j["delay_mean_ms"] = nullptr;
        } else {
            j["cost_total"] = round6(r.cost_total);
            j["cost_mean"] = r.cost_mean ? nlohmann::ordered_json(round6(*r.cost_mean))
                                         : nlohmann::ordered_json(nullptr);
            j["supported"] = r.supported;
            j["supported_pct"] = round6(r.supported_pct);
            j["delay_mean_ms"] = r.delay_mean_ms
                                     ? nlohmann::ordered_json(round6(*r.delay_mean_ms))
                                     : nlohmann::ordered_json(nullptr);
        }
        j["runtime_ms"] = round6(r.runtime_ms);
        j["accuracy"] = (!r.failed && r.accuracy)
                            ? nlohmann::ordered_json(round6(*r.accuracy))
                            : nlohmann::ordered_json(nullptr);
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<MetricsRow> rows_from_json(const std::string& text) {
    const auto arr = nlohmann::json::parse(text);
    std::vector<MetricsRow> rows;
    for (const auto& j : arr) {
        MetricsRow r;
        r.method = j.at("method").get<std::string>();
        r.sweep_value = j.at("sweep").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.failed = j.at("failed").get<bool>();
        if (!j.at("cost_total").is_null()) r.cost_total = j.at("cost_total").get<double>();
        if (!j.at("cost_mean").is_null()) r.cost_mean = j.at("cost_mean").get<double>();
        r.supported = j.at("supported").get<int>();
        if (!j.at("supported_pct").is_null())
            r.supported_pct = j.at("supported_pct").get<double>();
        if (!j.at("delay_mean_ms").is_null())
            r.delay_mean_ms = j.at("delay_mean_ms").get<double>();
        r.runtime_ms = j.at("runtime_ms").get<double>();
        if (!j.at("accuracy").is_null()) r.accuracy = j.at("accuracy").get<double>();
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace ccra
