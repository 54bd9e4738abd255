#include <doctest.h>

#include <cstdio>
#include <random>

#include "ccra/ddql.hpp"
#include "helpers.hpp"

using namespace ccra;
using ccra::testing::ScenarioBuilder;

namespace {

// entry (tier 0) with a cheap and an expensive host one hop away
Scenario two_host_scenario(double delay_req = 5.0, int requests = 1,
                           double node_cap = 100, double vnf_cap = 20) {
    ScenarioBuilder b;
    int e = b.add_node(0, 100, 10, true);
    int cheap = b.add_node(1, node_cap, 5);
    int dear = b.add_node(1, node_cap, 50);
    for (int v : {cheap, dear}) {
        b.add_link(e, v, 100, 1);
        b.add_link(v, e, 100, 1);
    }
    b.add_service(vnf_cap);
    for (int i = 0; i < requests; ++i) b.add_request(e, 0, 4, 5, delay_req, 1);
    return b.build();
}

NeuralNet constant_net(int width, std::initializer_list<double> values) {
    std::mt19937_64 rng(0);
    auto net = NeuralNet::make({width, static_cast<int>(values.size())}, rng);
    net.weights[0].setZero();
    int i = 0;
    for (double v : values) net.biases[0](i++) = v;
    return net;
}

}  // namespace

TEST_SUITE("ddql") {

TEST_CASE("state vector has the documented layout and length") {
    auto s = two_host_scenario();
    auto res = ResidualState::fresh(s);
    auto theta = encode_state(s, res);
    const int V = 3, L = 4, K = 2;
    REQUIRE(theta.size() == 2 * V + 2 * L + K * L);
    CHECK(theta.minCoeff() >= 0);
    // block 2: node costs; block 4: link costs
    CHECK(theta(V + 0) == 10);
    CHECK(theta(V + 1) == 5);
    CHECK(theta(2 * V + L) == 1);
    // fresh scenario twice -> identical vectors
    CHECK(theta == encode_state(s, ResidualState::fresh(s)));
}

TEST_CASE("committing a flow shows up only in the touched entries") {
    auto s = two_host_scenario();
    auto res = ResidualState::fresh(s);
    auto before = encode_state(s, res);
    Assignment a{1, 0, 0, 0};
    a.inquiry_path = s.paths_between(0, 1).front();
    a.response_path = s.paths_between(1, 0).front();
    REQUIRE(try_commit(s, res, s.request(0), a).ok);
    auto after = encode_state(s, res);
    const int V = 3, L = 4;
    // bandwidth block: the two traversed links dropped by the request's rate
    const int il = s.path(a.inquiry_path).links.front();
    const int rl = s.path(a.response_path).links.front();
    for (int l = 0; l < L; ++l) {
        const double expect = before(2 * V + l) - ((l == il || l == rl) ? 5.0 : 0.0);
        CHECK(after(2 * V + l) == doctest::Approx(expect));
    }
    // compute block: the hosting node lost VNF capacity, others untouched
    CHECK(after(0) == before(0));
    CHECK(after(1) < before(1));
    // cost blocks are static
    CHECK(after.segment(V, V) == before.segment(V, V));
}

TEST_CASE("pruning keeps the cheapest feasible nodes and paths") {
    auto s = two_host_scenario();
    auto p = prune_action_sets(s, 0, 1, 1);
    REQUIRE(p.nodes.size() == 1);
    CHECK(p.nodes[0] == 1);  // psi 5 beats psi 50

    auto all = prune_action_sets(s, 0, 10, 8);
    // every feasible node by cost; the entry itself has no path pair
    CHECK(all.nodes == std::vector<int>{1, 2});

    // p_limit=1 on a triangle: only the min-cost path per pair survives
    ScenarioBuilder b;
    int x = b.add_node(0, 100, 10, true);
    int y = b.add_node(1, 100, 5);
    int z = b.add_node(2, 100, 5);
    b.add_link(x, y, 100, 9);  // direct, dear
    b.add_link(x, z, 100, 1);
    b.add_link(z, y, 100, 1);  // detour x->z->y costs 2
    b.add_link(y, x, 100, 1);
    b.add_service(20);
    b.add_request(x, 0, 4, 5, 9.0, 1);
    auto tri = b.build();
    auto pt = prune_action_sets(tri, 0, 10, 1);
    for (const auto& [key, paths] : pt.inquiry) {
        REQUIRE(paths.size() == 1);
        double best = 1e18;
        for (int pid : tri.paths_between(key.first, key.second)) {
            double c = 0;
            for (int lid : tri.path(pid).links) c += tri.link(lid).unit_cost;
            best = std::min(best, c);
        }
        double got = 0;
        for (int lid : tri.path(paths[0]).links) got += tri.link(lid).unit_cost;
        CHECK(got == best);
    }
}

TEST_CASE("decoupled target uses the evaluation argmax under the target net") {
    Transition t;
    t.next_state = Eigen::VectorXd::Zero(2);
    t.reward = 1.0;
    auto q = constant_net(2, {1.0, 2.0});
    auto q_hat = constant_net(2, {5.0, 7.0});
    CHECK(ddql_target(t, q, q_hat, 0.5) == doctest::Approx(4.5));
    CHECK(ddql_target(t, q, q_hat, 0.0) == doctest::Approx(1.0));
    t.terminal = true;
    CHECK(ddql_target(t, q, q_hat, 0.5) == doctest::Approx(1.0));
    // degenerate decoupling: single action, identical nets -> plain DQN target
    t.terminal = false;
    auto single = constant_net(2, {3.0});
    CHECK(ddql_target(t, single, single, 0.5) == doctest::Approx(1.0 + 0.5 * 3.0));
}

TEST_CASE("action selection is greedy at zero epsilon and uniform at one") {
    std::mt19937_64 rng(0);
    Eigen::VectorXd state = Eigen::VectorXd::Zero(2);
    CHECK(select_action(constant_net(2, {1, 3, 2}), state, 0.0, rng) == 1);
    CHECK(select_action(constant_net(2, {2, 2, 1}), state, 0.0, rng) == 0);  // tie rule

    auto net = constant_net(2, {9, 9, 9});
    std::array<int, 3> counts{};
    for (int i = 0; i < 10000; ++i)
        ++counts[static_cast<std::size_t>(select_action(net, state, 1.0, rng))];
    double chi2 = 0;
    for (int c : counts) {
        const double d = c - 10000.0 / 3.0;
        chi2 += d * d / (10000.0 / 3.0);
    }
    CHECK(chi2 < 9.21);  // df=2 at alpha=0.01
}

TEST_CASE("joint actions commit only when feasible") {
    // node 1 fits exactly one VNF worth 20; three 8-unit requests overload it
    auto s = two_host_scenario(5.0, 3, /*node_cap=*/20, /*vnf_cap=*/20);
    for (auto& r : s.requests) r.capacity_req = 8;
    Environment env(s, 0, 1, 1);  // only the cheap node is in range
    auto ok1 = env.apply(0, {0, 0, 0, 0});
    CHECK(ok1.chi);
    CHECK(ok1.reward == doctest::Approx(100.0));  // single option: min == max
    auto ok2 = env.apply(1, {0, 0, 0, 0});
    CHECK(ok2.chi);
    auto before = encode_state(env.scenario(), env.residual());
    auto fail = env.apply(2, {0, 0, 0, 0});  // VNF spare is 4 < 8
    CHECK_FALSE(fail.chi);
    CHECK(fail.reward == 0.0);
    CHECK(encode_state(env.scenario(), env.residual()) == before);  // untouched
}

TEST_CASE("cheapest option earns the full reward, costliest earns zero") {
    auto s = two_host_scenario();
    Environment env(s, 0, 2, 1);
    auto cheap = env.apply(0, {0, 0, 0, 0});
    CHECK(cheap.chi);
    CHECK(cheap.reward == doctest::Approx(100.0));
    env.reset();
    auto dear = env.apply(0, {1, 0, 0, 0});
    CHECK(dear.chi);
    CHECK(dear.reward == doctest::Approx(0.0));
}

TEST_CASE("delay-violating priorities are refused via chi") {
    // level 0 bound is 0.52/link; level 1 is 2.03/link; D=1.5 only fits level 0
    auto s = two_host_scenario(1.5);
    Environment env(s, 0, 1, 1);
    CHECK(env.apply(0, {0, 0, 0, 0}).chi);
    env.reset();
    CHECK_FALSE(env.apply(0, {0, 1, 0, 0}).chi);
    CHECK_THROWS_AS((void)env.apply(0, {0, 5, 0, 0}), std::invalid_argument);
}

TEST_CASE("replay memory is a bounded ring") {
    ReplayMemory mem(5);
    for (int i = 0; i < 12; ++i) {
        Transition t;
        t.reward = i;
        mem.push(std::move(t));
        CHECK(mem.size() <= 5);
    }
    CHECK(mem.size() == 5);
    std::mt19937_64 rng(0);
    for (int i = 0; i < 50; ++i) CHECK(mem.sample(rng).reward >= 7);  // oldest evicted
}

TEST_CASE("training is deterministic and follows the epsilon schedule") {
    auto s = two_host_scenario(5.0, 3);
    TrainConfig cfg;
    cfg.steps = 150;
    cfg.batch_size = 8;
    cfg.hidden = {16, 16};
    cfg.sync_period = 50;
    cfg.eps_decrement = 2e-3;
    cfg.v_limit = 2;
    cfg.p_limit = 1;

    auto run = [&] {
        Environment env(s, 0, cfg.v_limit, cfg.p_limit);
        std::mt19937_64 rng(42);
        auto chain = AgentChain::make(env, cfg, rng);
        auto result = train(env, chain, cfg, rng);
        return std::make_pair(std::move(chain), std::move(result));
    };
    auto [chain_a, res_a] = run();
    auto [chain_b, res_b] = run();
    REQUIRE(res_a.trace.size() == 150);
    CHECK(reward_trace_to_csv(res_a.trace) == reward_trace_to_csv(res_b.trace));

    for (std::size_t i = 0; i < res_a.trace.size(); ++i) {
        const double tau = static_cast<double>(i + 1);
        CHECK(res_a.trace[i].epsilon ==
              doctest::Approx(std::max(0.05, 1.0 - tau * 2e-3)));
        CHECK(res_a.trace[i].beta >= 0);
        CHECK(res_a.trace[i].beta <= 100);
    }
    // 150 steps with sync 50: the last sync was the last step, so the target
    // is the current evaluation snapshot
    for (const auto& agent : chain_a.agents)
        for (std::size_t l = 0; l < agent.eval.weights.size(); ++l)
            CHECK(agent.eval.weights[l] == agent.target.weights[l]);
}

TEST_CASE("committed decisions are feasible and drift is flagged on starvation") {
    auto s = two_host_scenario(5.0, 4);
    TrainConfig cfg;
    cfg.steps = 400;
    cfg.batch_size = 8;
    cfg.hidden = {16, 16};
    cfg.eps_auto = true;
    cfg.v_limit = 2;
    cfg.p_limit = 1;
    Environment env(s, 0, cfg.v_limit, cfg.p_limit);
    std::mt19937_64 rng(1);
    auto chain = AgentChain::make(env, cfg, rng);
    train(env, chain, cfg, rng);

    auto res = decide(env, chain, cfg);
    CHECK(res.supported.size() + res.rejected.size() == 4);
    CHECK(check_feasibility(s, res.solution, DelayMode::Linearized).feasible);

    // requirement drops to 1 ms: every action bounces, the EMA collapses
    auto tight = s;
    for (auto& r : tight.requests) r.delay_req = 0.001;
    Environment drifted(tight, 0, cfg.v_limit, cfg.p_limit);
    double beta_bar = 100.0;
    bool drift = false;
    for (int pass = 0; pass < 50 && !drift; ++pass) {
        auto d = decide(drifted, chain, cfg, beta_bar);
        beta_bar = d.beta_bar;
        drift = d.drift;
    }
    CHECK(drift);
}

TEST_CASE("chain files round-trip and remember their scenario") {
    auto s = two_host_scenario(5.0, 2);
    TrainConfig cfg;
    cfg.hidden = {8};
    cfg.v_limit = 2;
    cfg.p_limit = 1;
    Environment env(s, 0, cfg.v_limit, cfg.p_limit);
    std::mt19937_64 rng(9);
    auto chain = AgentChain::make(env, cfg, rng);
    CHECK(chain.scenario_hash == scenario_fingerprint(s));

    const std::string path = "chain_roundtrip_test.bin";
    chain.save(path);
    auto back = AgentChain::load(path);
    std::remove(path.c_str());
    CHECK(back.service == chain.service);
    CHECK(back.scenario_hash == chain.scenario_hash);
    auto a = decide(env, chain, cfg);
    auto b = decide(env, back, cfg);
    CHECK(a.cost == b.cost);
    CHECK(a.supported == b.supported);
}

}  // TEST_SUITE
