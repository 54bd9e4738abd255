// Command-line surface of the CCRA suite: scenario generation, single-scenario
// solving, policy training, experiment sweeps and report re-emission.
//
// Exit codes: 0 success, 2 invalid configuration or I/O problem,
// 3 certified infeasible, 4 method failure.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccra/allocation.hpp"
#include "ccra/baselines.hpp"
#include "ccra/bb.hpp"
#include "ccra/ddql.hpp"
#include "ccra/generator.hpp"
#include "ccra/harness.hpp"
#include "ccra/wf.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kInfeasible = 3;
constexpr int kMethodFailure = 4;

struct InvalidConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MethodFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CertifiedInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidConfig("cannot write " + path);
    out << content;
    if (!out) throw InvalidConfig("write failed: " + path);
}

ccra::GeneratorConfig profile_config(const std::string& profile) {
    if (profile == "desk") return ccra::desk_config();
    if (profile == "paper-default") return ccra::paper_default_config();
    throw InvalidConfig("unknown profile: " + profile);
}

// Pulls the action-set limits a saved chain was trained with out of its
// output-layer widths, so `solve --method ddql` never needs them re-specified.
void chain_limits(const ccra::AgentChain& chain, int& v_limit, int& p_limit) {
    v_limit = chain.agents[0].eval.sizes.back();
    p_limit = chain.agents[2].eval.sizes.back();
}

int run_gen(const std::string& profile, const std::string& config_path, std::uint64_t seed,
            int nodes, int requests, double delay, const std::string& out) {
    auto cfg = config_path.empty() ? profile_config(profile)
                                   : ccra::generator_config_from_json(read_file(config_path));
    if (nodes > 0) cfg.node_count = nodes;
    if (requests > 0) cfg.request_count = requests;
    if (delay > 0) cfg.delay_req_range = {delay, delay};
    const auto s = ccra::generate_scenario(cfg, seed);
    write_file(out, ccra::scenario_to_json(s));
    return kOk;
}

int run_solve(const std::string& scenario_path, const std::string& method,
              std::uint64_t seed, double time_limit, const std::string& chain_path,
              bool timing, const std::string& out, const std::string& trace_path) {
    const auto s = ccra::scenario_from_json(read_file(scenario_path));
    const auto t0 = std::chrono::steady_clock::now();

    nlohmann::ordered_json j;
    ccra::Solution sol;
    int code = kOk;

    if (method == "bb") {
        ccra::BBConfig bc;
        bc.time_limit_s = time_limit;
        auto wf = ccra::wf_solve(s);
        if (wf.rejected.empty()) {
            bc.warm_solution = wf.solution;
            bc.warm_cost = wf.cost;
        }
        auto res = ccra::bb_solve(s, bc);
        const char* status = res.status == ccra::BBStatus::Optimal     ? "optimal"
                             : res.status == ccra::BBStatus::Feasible  ? "feasible"
                             : res.status == ccra::BBStatus::Infeasible
                                 ? "infeasible"
                                 : "model_infeasible";
        j["method"] = method;
        j["status"] = status;
        j["cost"] = res.cost;
        j["bound"] = res.bound;
        j["gap"] = res.gap;
        j["nodes"] = res.nodes;
        if (res.incumbent) {
            sol = *res.incumbent;
            j["solution"] = nlohmann::ordered_json::parse(ccra::solution_to_json(sol));
        } else {
            j["solution"] = nullptr;
            code = kInfeasible;  // certificate, not a crash
        }
        if (!trace_path.empty()) {
            // wall-clock stamps would break byte-reproducibility of artifacts
            if (!timing)
                for (auto& p : res.trace) p.t_ms = 0;
            write_file(trace_path, ccra::trace_to_csv(res.trace));
        }
    } else if (method == "ddql") {
        if (chain_path.empty()) throw InvalidConfig("--method ddql requires --chain");
        auto chain = ccra::AgentChain::load(chain_path);
        if (chain.scenario_hash != ccra::scenario_fingerprint(s))
            throw InvalidConfig("chain was trained on a different scenario");
        int v_limit = 0, p_limit = 0;
        chain_limits(chain, v_limit, p_limit);
        ccra::TrainConfig cfg;
        cfg.v_limit = v_limit;
        cfg.p_limit = p_limit;
        ccra::Environment env(s, chain.service, v_limit, p_limit);
        auto dec = ccra::decide(env, chain, cfg);
        sol = dec.solution;
        j["method"] = method;
        j["cost"] = dec.cost;
        j["supported"] = dec.supported;
        j["rejected"] = dec.rejected;
        j["reward_ema"] = dec.beta_bar;
        j["drift"] = dec.drift;
        j["solution"] = nlohmann::ordered_json::parse(ccra::solution_to_json(sol));
    } else {
        ccra::WFResult res;
        if (method == "wf") {
            res = ccra::wf_solve(s);
        } else {
            // throws on unknown names -> invalid configuration
            ccra::BaselineKind kind;
            try {
                kind = ccra::baseline_kind_from_string(method);
            } catch (const std::invalid_argument& e) {
                throw InvalidConfig(e.what());
            }
            res = ccra::baseline_solve(s, kind, seed);
        }
        sol = res.solution;
        j = nlohmann::ordered_json::parse(ccra::wf_result_to_json(res));
        j["method"] = method;
    }

    if (code == kOk && !ccra::check_feasibility(s, sol, ccra::DelayMode::Exact).feasible)
        throw MethodFailure(method + " produced an infeasible solution");

    const auto t1 = std::chrono::steady_clock::now();
    j["runtime_ms"] =
        timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
    const auto text = j.dump(2) + "\n";
    if (out.empty())
        std::cout << text;
    else
        write_file(out, text);
    return code;
}

int run_train(const std::string& scenario_path, int service, long steps, std::uint64_t seed,
              double lr, bool eps_auto, int v_limit, int p_limit, const std::string& out,
              const std::string& trace_path) {
    const auto s = ccra::scenario_from_json(read_file(scenario_path));
    if (service < 0 || service >= static_cast<int>(s.services.size()))
        throw InvalidConfig("service index out of range");
    ccra::TrainConfig cfg;
    cfg.steps = steps;
    if (lr > 0) cfg.learning_rate = lr;
    cfg.eps_auto = eps_auto;
    cfg.v_limit = v_limit;
    cfg.p_limit = p_limit;
    ccra::Environment env(s, service, cfg.v_limit, cfg.p_limit);
    std::mt19937_64 rng(seed);
    auto chain = ccra::AgentChain::make(env, cfg, rng);
    auto result = ccra::train(env, chain, cfg, rng);
    chain.save(out);
    if (!trace_path.empty())
        write_file(trace_path, ccra::reward_trace_to_csv(result.trace));
    return kOk;
}

int run_experiment_cmd(const std::string& plan_path, const std::string& out_prefix) {
    ccra::ExperimentPlan plan;
    try {
        plan = ccra::plan_from_json(read_file(plan_path));
    } catch (const InvalidConfig&) {
        throw;
    } catch (const std::exception& e) {
        throw InvalidConfig(e.what());
    }
    auto rows = ccra::run_experiment(plan);
    write_file(out_prefix + ".csv", ccra::report_csv(rows));
    write_file(out_prefix + ".json", ccra::report_json(rows));
    return kOk;
}

int run_report(const std::string& rows_path, const std::string& out) {
    std::vector<ccra::MetricsRow> rows;
    try {
        rows = ccra::rows_from_json(read_file(rows_path));
    } catch (const InvalidConfig&) {
        throw;
    } catch (const std::exception& e) {
        throw InvalidConfig(e.what());
    }
    write_file(out, ccra::report_csv(rows));
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint communication-and-computing resource allocation suite"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand name

    std::uint64_t seed = 0;
    std::string out;
    std::string profile = "desk";
    app.add_option("--seed", seed, "Seed for anything randomized");
    app.add_option("--out", out, "Output path");
    app.add_option("--profile", profile, "Scenario profile: desk | paper-default");

    auto* gen = app.add_subcommand("gen", "Generate a scenario file");
    std::string gen_config;
    int gen_nodes = 0, gen_requests = 0;
    double gen_delay = 0;
    gen->add_option("--config", gen_config, "Generator config JSON (overrides --profile)");
    gen->add_option("--nodes", gen_nodes, "Override node count");
    gen->add_option("--requests", gen_requests, "Override request count");
    gen->add_option("--delay", gen_delay, "Override delay requirement (seconds)");

    auto* solve = app.add_subcommand("solve", "Solve one scenario with one method");
    std::string sc_path, method, chain_path, trace_path;
    double time_limit = 120.0;
    bool timing = false;
    solve->add_option("--scenario", sc_path, "Scenario JSON")->required();
    solve->add_option("--method", method, "wf|bb|ddql|r|cm|dm|fsa|bsa|cep")->required();
    solve->add_option("--time-limit", time_limit, "Exact-solver budget in seconds");
    solve->add_option("--chain", chain_path, "Trained agent chain (ddql)");
    solve->add_option("--trace", trace_path, "Search trace CSV (bb)");
    solve->add_flag("--timing", timing, "Report wall-clock runtime (non-deterministic)");

    auto* train = app.add_subcommand("train", "Train an agent chain on a scenario");
    std::string tr_scenario, tr_trace;
    int service = 0, v_limit = 4, p_limit = 2;
    long steps = 10000;
    double lr = 0;
    bool eps_auto = false;
    train->add_option("--scenario", tr_scenario, "Scenario JSON")->required();
    train->add_option("--service", service, "Service the chain serves");
    train->add_option("--steps", steps, "Training steps");
    train->add_option("--lr", lr, "Learning rate");
    train->add_flag("--eps-auto", eps_auto, "Auto exploration decay over 80% of the run");
    train->add_option("--v-limit", v_limit, "Pruned node-set size");
    train->add_option("--p-limit", p_limit, "Pruned path-set size per direction");
    train->add_option("--trace", tr_trace, "Reward trace CSV");

    auto* experiment = app.add_subcommand("experiment", "Run a sweep plan");
    std::string plan_path;
    experiment->add_option("--plan", plan_path, "Plan JSON")->required();

    auto* report = app.add_subcommand("report", "Re-emit a CSV report from row JSON");
    std::string rows_path;
    report->add_option("--rows", rows_path, "Rows JSON produced by `experiment`")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInvalid;
    }

    try {
        if (gen->parsed()) {
            if (out.empty()) throw InvalidConfig("gen requires --out");
            return run_gen(profile, gen_config, seed, gen_nodes, gen_requests, gen_delay, out);
        }
        if (solve->parsed())
            return run_solve(sc_path, method, seed, time_limit, chain_path, timing, out,
                             trace_path);
        if (train->parsed()) {
            if (out.empty()) throw InvalidConfig("train requires --out");
            return run_train(tr_scenario, service, steps, seed, lr, eps_auto, v_limit,
                             p_limit, out, tr_trace);
        }
        if (experiment->parsed()) {
            if (out.empty()) throw InvalidConfig("experiment requires --out");
            return run_experiment_cmd(plan_path, out);
        }
        if (report->parsed()) {
            if (out.empty()) throw InvalidConfig("report requires --out");
            return run_report(rows_path, out);
        }
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const CertifiedInfeasible& e) {
        std::cerr << e.what() << '\n';
        return kInfeasible;
    } catch (const MethodFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMethodFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kMethodFailure;
    }
    return kInvalid;
}
