#pragma once

#include <vector>

#include "ccra/allocation.hpp"
#include "ccra/model.hpp"
#include "ccra/paths.hpp"

namespace ccra::testing {

// Small hand-built scenarios for tests.
struct ScenarioBuilder {
    Scenario s;
    int levels = 2;
    double queue_each = 50.0;
    double max_packet = 1.0;

    int add_node(int tier, double cap, double cost, bool entry = false) {
        NodeSpec n;
        n.id = static_cast<int>(s.nodes.size());
        n.tier = tier;
        n.compute_capacity = cap;
        n.unit_cost = cost;
        n.is_entry = entry;
        s.nodes.push_back(n);
        return n.id;
    }

    int add_link(int from, int to, double bw, double cost) {
        LinkSpec l;
        l.id = static_cast<int>(s.links.size());
        l.from = from;
        l.to = to;
        l.bandwidth = bw;
        l.unit_cost = cost;
        s.links.push_back(l);
        return l.id;
    }

    int add_service(double cap) {
        s.services.push_back({static_cast<int>(s.services.size()), cap});
        return s.services.back().id;
    }

    int add_request(int entry, int service, double c, double b, double d, double t,
                    double h = 1.0) {
        RequestSpec r;
        r.id = static_cast<int>(s.requests.size());
        r.entry_node = entry;
        r.service = service;
        r.capacity_req = c;
        r.bandwidth_req = b;
        r.delay_req = d;
        r.burstiness = t;
        r.packet_size = h;
        s.requests.push_back(r);
        return r.id;
    }

    Scenario build(int per_pair_limit = 8) {
        s.priorities.level_count = levels;
        s.priorities.queue_size.assign(static_cast<std::size_t>(levels), queue_each);
        s.priorities.max_packet = max_packet;
        s.priorities.bandwidth_share.clear();
        for (const auto& l : s.links)
            s.priorities.bandwidth_share.push_back(
                std::vector<double>(static_cast<std::size_t>(levels), l.bandwidth / levels));
        s.paths = enumerate_paths(s.nodes, s.links, per_pair_limit);
        return s;
    }
};

// Chain topology entry - A(tier 0) - B(tier 1) - C(tier 2) with one priority
// level. Per-link delay bound is 0.052 s and the compute delay 0.25 s, so a
// 0.4 s requirement is only met on the tier-0 node A (0.354 s round trip;
// B needs 0.458 s, C 0.562 s). Node cost falls towards the core (A dearest),
// and each node fits exactly one 20-unit VNF serving five 4-unit requests.
inline Scenario tight_tier_scenario(int request_count = 12) {
    ScenarioBuilder b;
    b.levels = 1;
    int e = b.add_node(0, 20, 1000, true);
    int a = b.add_node(0, 20, 1000);
    int mid = b.add_node(1, 20, 100);
    int core = b.add_node(2, 20, 10);
    for (auto [x, y] : {std::pair{e, a}, {a, mid}, {mid, core}}) {
        b.add_link(x, y, 1000, 1);
        b.add_link(y, x, 1000, 1);
    }
    b.add_service(20);
    for (int i = 0; i < request_count; ++i) b.add_request(e, 0, 4, 2, 0.4, 1);
    return b.build();
}

}  // namespace ccra::testing
