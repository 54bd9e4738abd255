#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ccra/allocation.hpp"
#include "ccra/generator.hpp"
#include "ccra/model.hpp"
#include "helpers.hpp"

using namespace ccra;
using ccra::testing::ScenarioBuilder;

namespace {

// Two nodes joined by one 100 Mbps link per direction; request 0 carries
// T=2,B=10 and request 1 carries T=3,B=20.
Scenario two_flow_scenario() {
    ScenarioBuilder b;
    int a = b.add_node(0, 100, 10, true);
    int c = b.add_node(1, 100, 10);
    b.add_link(a, c, 100, 1);
    b.add_link(c, a, 100, 1);
    int srv = b.add_service(20);
    b.add_request(a, srv, 4, 10, 5.0, 2);
    b.add_request(a, srv, 4, 20, 5.0, 3);
    (void)c;
    return b.build();
}

Solution both_assigned(const Scenario& s, int prio0, int prio1) {
    Solution sol;
    int in = s.paths_between(0, 1)[0];
    int out = s.paths_between(1, 0)[0];
    sol.assignments[0] = {1, prio0, in, out};
    sol.assignments[1] = {1, prio1, in, out};
    sol.vnf_at.insert({0, 1});
    return sol;
}

}  // namespace

TEST_SUITE("allocation") {

TEST_CASE("service delay is packet over capacity") {
    RequestSpec r;
    r.packet_size = 1;
    r.capacity_req = 4;
    CHECK(service_delay(r) == doctest::Approx(0.25));
    r.capacity_req = 8;
    CHECK(service_delay(r) == doctest::Approx(0.125));
    r.packet_size = 2;
    r.capacity_req = 4;
    CHECK(service_delay(r) == doctest::Approx(0.5));
    r.capacity_req = 0;
    CHECK_THROWS_AS((void)service_delay(r), std::domain_error);
}

TEST_CASE("exact per-link delay matches hand substitutions") {
    auto s = two_flow_scenario();

    Solution lone;
    lone.assignments[0] = {1, 0, s.paths_between(0, 1)[0], s.paths_between(1, 0)[0]};
    lone.vnf_at.insert({0, 1});
    CHECK(link_delay_exact(s, lone, 0, 0, 0) == doctest::Approx(0.03));

    // request 0 demoted below request 1 on the shared link
    auto sol = both_assigned(s, 1, 0);
    CHECK(link_delay_exact(s, sol, 0, 1, 0) == doctest::Approx(0.0725));
    CHECK(link_delay_exact(s, sol, 1, 0, 0) == doctest::Approx(0.05));
}

TEST_CASE("exact delay throws when lower levels saturate the link") {
    auto s = two_flow_scenario();
    s.requests[1].bandwidth_req = 120;  // exceeds the 100 Mbps link alone
    auto sol = both_assigned(s, 1, 0);
    CHECK_THROWS_AS((void)link_delay_exact(s, sol, 0, 1, 0), SaturationError);
}

TEST_CASE("linearized per-link bound matches hand substitutions") {
    PriorityConfig pr;
    pr.level_count = 4;
    pr.queue_size = {50, 50, 50, 50};
    pr.max_packet = 1;
    LinkSpec l{0, 0, 1, 250, 1};
    pr.bandwidth_share = {{62.5, 62.5, 62.5, 62.5}};
    CHECK(link_delay_bound(pr, l, 0) == doctest::Approx(0.208));
    CHECK(link_delay_bound(pr, l, 1) == doctest::Approx(0.5427).epsilon(1e-3));
    CHECK(link_delay_bound(pr, l, 3) == doctest::Approx(3.220));

    // bound grows with the level
    auto table = delay_bound_table(pr, {l});
    for (int k = 1; k < 4; ++k)
        CHECK(table[static_cast<std::size_t>(k)][0] >
              table[static_cast<std::size_t>(k - 1)][0]);

    pr.bandwidth_share = {{250, 62.5, 62.5, 62.5}};
    CHECK_THROWS_AS((void)link_delay_bound(pr, l, 1), ConfigurationError);
}

TEST_CASE("end-to-end delay composes links and compute") {
    auto s = two_flow_scenario();
    Solution lone;
    lone.assignments[0] = {1, 0, s.paths_between(0, 1)[0], s.paths_between(1, 0)[0]};
    lone.vnf_at.insert({0, 1});
    auto rep = e2e_delay(s, lone, 0, DelayMode::Exact);
    CHECK(rep.compute_delay == doctest::Approx(0.25));
    CHECK(rep.total == doctest::Approx(0.31));
    CHECK(rep.link_terms.size() == 2);
    CHECK_THROWS_AS((void)e2e_delay(s, lone, 1, DelayMode::Exact), std::invalid_argument);
}

TEST_CASE("objective charges node cost per request and links per direction") {
    ScenarioBuilder b;
    int a = b.add_node(0, 100, 99, true);
    int m = b.add_node(0, 100, 99);
    int c = b.add_node(1, 100, 10);
    b.add_link(a, m, 100, 10);
    b.add_link(m, c, 100, 10);
    b.add_link(c, m, 100, 10);
    b.add_link(m, a, 100, 10);
    int srv = b.add_service(20);
    b.add_request(a, srv, 4, 5, 1.0, 1);
    auto s = b.build();

    Solution sol;
    sol.assignments[0] = {c, 0, s.paths_between(a, c)[0], s.paths_between(c, a)[0]};
    sol.vnf_at.insert({srv, c});
    CHECK(objective(s, sol) == doctest::Approx(50.0));
    CHECK(objective(s, Solution{}) == doctest::Approx(0.0));
}

TEST_CASE("a shared VNF node is still charged once per request") {
    auto s = two_flow_scenario();
    for (auto& l : s.links) l.unit_cost = 10;
    auto sol = both_assigned(s, 0, 0);
    // node cost 10 each + two 1-link paths at cost 10 each per request
    CHECK(objective(s, sol) == doctest::Approx(2 * 10 + 2 * (10 + 10)));
}

TEST_CASE("reward endpoints and clamping") {
    CHECK(reward(10, 10, 20, true) == doctest::Approx(100.0));
    CHECK(reward(15, 10, 20, true) == doctest::Approx(50.0));
    CHECK(reward(20, 10, 20, true) == doctest::Approx(0.0));
    CHECK(reward(15, 10, 20, false) == doctest::Approx(0.0));
    CHECK(reward(7, 7, 7, true) == doctest::Approx(100.0));
    CHECK(reward(25, 10, 20, true) == doctest::Approx(0.0));  // clamped
}

TEST_CASE("accuracy metric") {
    CHECK(accuracy(100, 100) == doctest::Approx(1.0));
    CHECK(accuracy(120, 100) == doctest::Approx(0.8));
    CHECK_THROWS_AS((void)accuracy(99, 100), std::domain_error);
    CHECK_THROWS_AS((void)accuracy(1, 0), std::domain_error);
}

TEST_CASE("feasibility checker reports hand-built violations") {
    auto s = two_flow_scenario();
    s.requests[0].capacity_req = 15;
    s.requests[1].capacity_req = 15;
    auto sol = both_assigned(s, 0, 1);
    auto v = check_feasibility(s, sol, DelayMode::Exact);
    REQUIRE_FALSE(v.feasible);
    REQUIRE(v.violations.size() == 1);
    CHECK(v.violations[0].tag == "C3");
    CHECK(v.violations[0].slack == doctest::Approx(-10.0));

    // node without the VNF
    auto s2 = two_flow_scenario();
    auto sol2 = both_assigned(s2, 0, 1);
    sol2.vnf_at.clear();
    auto v2 = check_feasibility(s2, sol2, DelayMode::Exact);
    REQUIRE_FALSE(v2.feasible);
    CHECK(v2.violations[0].tag == "C2");

    // untouched instance is clean in both modes
    auto s3 = two_flow_scenario();
    auto sol3 = both_assigned(s3, 0, 1);
    CHECK(check_feasibility(s3, sol3, DelayMode::Exact).feasible);
    CHECK(check_feasibility(s3, sol3, DelayMode::Linearized).feasible);
}

TEST_CASE("commit and rollback restore the residual exactly") {
    auto s = two_flow_scenario();
    auto res = ResidualState::fresh(s);
    const auto before = res;

    Assignment a{1, 0, s.paths_between(0, 1)[0], s.paths_between(1, 0)[0]};
    auto rec = try_commit(s, res, s.request(0), a);
    REQUIRE(rec.ok);
    CHECK(rec.opened_vnf);
    CHECK(res.node_free[1] == doctest::Approx(80.0));  // whole VNF block reserved
    CHECK(res.vnf_free.at({0, 1}) == doctest::Approx(16.0));
    CHECK(res.link_free[0] == doctest::Approx(90.0));
    CHECK(res.share_free[0][0] == doctest::Approx(40.0));
    CHECK(res.queue_free[0][0] == doctest::Approx(48.0));

    // second request reuses the VNF without touching node capacity
    Assignment a2{1, 1, a.inquiry_path, a.response_path};
    auto rec2 = try_commit(s, res, s.request(1), a2);
    REQUIRE(rec2.ok);
    CHECK_FALSE(rec2.opened_vnf);
    CHECK(res.node_free[1] == doctest::Approx(80.0));
    CHECK(res.vnf_free.at({0, 1}) == doctest::Approx(12.0));

    rollback(s, res, s.request(1), a2, rec2);
    rollback(s, res, s.request(0), a, rec);
    CHECK(res.node_free == before.node_free);
    CHECK(res.link_free == before.link_free);
    CHECK(res.share_free == before.share_free);
    CHECK(res.queue_free == before.queue_free);
    CHECK(res.vnf_free.empty());
}

TEST_CASE("commit refuses what does not fit and leaves the residual alone") {
    auto s = two_flow_scenario();
    auto res = ResidualState::fresh(s);
    s.requests[0].bandwidth_req = 60;  // over the 50 Mbps per-level share
    Assignment a{1, 0, s.paths_between(0, 1)[0], s.paths_between(1, 0)[0]};
    auto rec = try_commit(s, res, s.request(0), a);
    CHECK_FALSE(rec.ok);
    CHECK(res.link_free[0] == doctest::Approx(100.0));
    CHECK(res.vnf_free.empty());
}

TEST_CASE("verdict agrees with a brute-force evaluator on a small instance") {
    ScenarioBuilder b;
    b.queue_each = 4.0;
    int a = b.add_node(0, 25, 10, true);
    int n1 = b.add_node(1, 25, 10);
    int n2 = b.add_node(1, 40, 100);
    b.add_link(a, n1, 40, 1);
    b.add_link(n1, a, 40, 1);
    b.add_link(a, n2, 40, 2);
    b.add_link(n2, a, 40, 2);
    b.add_link(n1, n2, 40, 1);
    b.add_link(n2, n1, 40, 1);
    int srv = b.add_service(25);
    b.add_request(a, srv, 9, 12, 0.9, 3);
    b.add_request(a, srv, 9, 12, 0.9, 3);
    auto s = b.build(2);

    // Independent constraint evaluator written straight from the formulas.
    auto brute_ok = [&s](const Solution& sol) {
        const int K = s.priorities.level_count;
        std::map<std::pair<int, int>, double> vnf_load;
        std::map<int, double> node_load;
        std::vector<double> bw(s.links.size(), 0);
        std::vector<std::vector<double>> bw_k(s.links.size(), std::vector<double>(K, 0));
        std::vector<std::vector<double>> burst(s.links.size(), std::vector<double>(K, 0));
        for (const auto& [srv_id, node] : sol.vnf_at)
            node_load[node] += s.service(srv_id).vnf_capacity;
        for (const auto& [nid, load] : node_load)
            if (load > s.node(nid).compute_capacity + 1e-9) return false;
        for (const auto& [rid, asg] : sol.assignments) {
            const auto& r = s.request(rid);
            vnf_load[{r.service, asg.node}] += r.capacity_req;
            for (int pid : {asg.inquiry_path, asg.response_path}) {
                for (int lid : s.path(pid).links) {
                    const auto ul = static_cast<std::size_t>(lid);
                    const auto uk = static_cast<std::size_t>(asg.priority);
                    bw[ul] += r.bandwidth_req;
                    bw_k[ul][uk] += r.bandwidth_req;
                    burst[ul][uk] += r.burstiness;
                }
            }
        }
        for (const auto& [key, load] : vnf_load)
            if (load > s.service(key.first).vnf_capacity + 1e-9) return false;
        for (const auto& l : s.links) {
            const auto ul = static_cast<std::size_t>(l.id);
            if (bw[ul] > l.bandwidth + 1e-9) return false;
            for (int k = 0; k < K; ++k) {
                const auto uk = static_cast<std::size_t>(k);
                if (burst[ul][uk] > s.priorities.queue_size[uk] + 1e-9) return false;
                if (bw_k[ul][uk] > s.priorities.bandwidth_share[ul][uk] + 1e-9) return false;
            }
        }
        for (const auto& [rid, asg] : sol.assignments) {
            const auto& r = s.request(rid);
            double d = r.packet_size / r.capacity_req;
            for (int pid : {asg.inquiry_path, asg.response_path}) {
                for (int lid : s.path(pid).links) {
                    const auto& l = s.link(lid);
                    const auto ul = static_cast<std::size_t>(lid);
                    double q = 0, f = 0;
                    for (int k = 0; k <= asg.priority; ++k)
                        q += s.priorities.queue_size[static_cast<std::size_t>(k)];
                    for (int k = 0; k < asg.priority; ++k)
                        f += s.priorities.bandwidth_share[ul][static_cast<std::size_t>(k)];
                    d += (q + s.priorities.max_packet) / (l.bandwidth - f) +
                         s.priorities.max_packet / l.bandwidth;
                }
            }
            if (d > r.delay_req + 1e-9) return false;
        }
        return true;
    };

    // all per-request options: unsupported, or (node, level, path pair)
    struct Opt {
        bool used = false;
        Assignment a;
    };
    std::vector<Opt> options{{}};
    for (const auto& n : s.nodes) {
        for (int pin : s.paths_between(a, n.id)) {
            for (int pout : s.paths_between(n.id, a)) {
                for (int k = 0; k < s.priorities.level_count; ++k)
                    options.push_back({true, {n.id, k, pin, pout}});
            }
        }
    }

    int agree = 0, feasible_count = 0, infeasible_count = 0;
    for (const auto& o0 : options) {
        for (const auto& o1 : options) {
            Solution sol;
            if (o0.used) {
                sol.assignments[0] = o0.a;
                sol.vnf_at.insert({srv, o0.a.node});
            }
            if (o1.used) {
                sol.assignments[1] = o1.a;
                sol.vnf_at.insert({srv, o1.a.node});
            }
            const bool expect = brute_ok(sol);
            const bool got = check_feasibility(s, sol, DelayMode::Linearized).feasible;
            if (expect == got) ++agree;
            (expect ? feasible_count : infeasible_count)++;
        }
    }
    CHECK(agree == static_cast<int>(options.size() * options.size()));
    CHECK(feasible_count > 0);
    CHECK(infeasible_count > 0);
}

TEST_CASE("exact delay never exceeds the linearized bound on committed loads") {
    auto cfg = desk_config();
    std::mt19937_64 rng(99);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto s = generate_scenario(cfg, seed);
        auto res = ResidualState::fresh(s);
        Solution sol;
        for (const auto& r : s.requests) {
            // random structurally valid option, committed only if caps allow
            std::vector<Assignment> opts;
            for (const auto& n : s.nodes)
                for (int pin : s.paths_between(r.entry_node, n.id))
                    for (int pout : s.paths_between(n.id, r.entry_node))
                        for (int k = 0; k < s.priorities.level_count; ++k)
                            opts.push_back({n.id, k, pin, pout});
            if (opts.empty()) continue;
            auto& pick = opts[rng() % opts.size()];
            auto rec = try_commit(s, res, r, pick);
            if (!rec.ok) continue;
            sol.assignments[r.id] = pick;
            sol.vnf_at.insert({r.service, pick.node});
        }
        for (const auto& [rid, asg] : sol.assignments) {
            for (int pid : {asg.inquiry_path, asg.response_path}) {
                for (int lid : s.path(pid).links) {
                    const double exact = link_delay_exact(s, sol, rid, asg.priority, lid);
                    const double bound =
                        link_delay_bound(s.priorities, s.link(lid), asg.priority);
                    CHECK(exact <= bound + 1e-12);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("solution json round-trips") {
    auto s = two_flow_scenario();
    auto sol = both_assigned(s, 0, 1);
    auto text = solution_to_json(sol);
    auto back = solution_from_json(text);
    CHECK(solution_to_json(back) == text);
    CHECK(back.assignments.size() == 2);
    CHECK(back.vnf_at == sol.vnf_at);
}

}  // TEST_SUITE
