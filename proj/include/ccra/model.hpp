#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ccra {

// Tiered TSN infrastructure: nodes carry compute capacity, links carry
// bandwidth, and every egress port runs a per-priority ATS queue. Lower
// priority index = higher priority.

struct NodeSpec {
    int id = -1;
    int tier = 0;               // 0 = edge
    double compute_capacity = 0;
    double unit_cost = 0;
    bool is_entry = false;
};

struct LinkSpec {
    int id = -1;
    int from = -1;
    int to = -1;                // directed
    double bandwidth = 0;
    double unit_cost = 0;
};

struct PathSpec {
    int id = -1;
    int head = -1;
    int tail = -1;
    std::vector<int> links;     // ordered, chains head -> tail, loop-free
};

struct PriorityConfig {
    int level_count = 0;
    std::vector<double> queue_size;                  // per level
    std::vector<std::vector<double>> bandwidth_share; // [link][level]
    double max_packet = 1.0;
};

struct ServiceSpec {
    int id = -1;
    double vnf_capacity = 0;
};

struct RequestSpec {
    int id = -1;
    int entry_node = -1;
    int service = -1;
    double capacity_req = 0;
    double bandwidth_req = 0;
    double delay_req = 0;       // seconds
    double burstiness = 0;
    double packet_size = 0;
};

struct Scenario {
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
    std::vector<PathSpec> paths;
    PriorityConfig priorities;
    std::vector<ServiceSpec> services;
    std::vector<RequestSpec> requests;
    std::uint64_t rng_seed = 0;

    int tier_count() const;
    std::vector<int> entry_nodes() const;

    // Paths with the given head and tail, in stored (id) order.
    std::vector<int> paths_between(int head, int tail) const;

    const PathSpec& path(int id) const;
    const LinkSpec& link(int id) const;
    const NodeSpec& node(int id) const;
    const ServiceSpec& service(int id) const;
    const RequestSpec& request(int id) const;

    // delta_{p,l}: true iff path p contains link l. Throws on unknown ids.
    bool path_contains(int path_id, int link_id) const;

    // Returns human-readable violations of the type invariants; empty if valid.
    std::vector<std::string> validate() const;
};

// Serialization to/from the documented JSON schema (explicit ids, no
// positional coupling). Deterministic key order and number formatting.
std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

}  // namespace ccra
