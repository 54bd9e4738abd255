#pragma once

#include <cstdint>
#include <stdexcept>

#include "ccra/model.hpp"

namespace ccra {

struct IntRange {
    long lo = 0;
    long hi = 0;
};

struct RealRange {
    double lo = 0;
    double hi = 0;
};

// Which tier gets the high compute capacity. Table: x counts down from the
// edge, making tier 0 the highest-capacity (and most expensive) tier.
// Prose: capacity grows towards the core instead; cost is unaffected.
enum class CapacityRule { Table, Prose };

struct GeneratorConfig {
    int node_count = 9;
    int tier_count = 3;
    int entry_tier = 0;

    // link count ~ U{min_factor*V, max_factor*V}, clamped into what a simple
    // directed graph on V nodes can carry while staying strongly connected
    RealRange link_count_factor{3.0, 5.0};
    IntRange bandwidth_range{250, 300};
    IntRange link_cost_range{10, 20};

    CapacityRule capacity_rule = CapacityRule::Table;
    double node_capacity_scale = 100.0;  // zeta ~ scale * U(x, x+1)
    double node_cost_base = 10.0;        // Psi = base^(x+1)

    int priority_count = 4;
    double queue_total = 200.0;  // split evenly across levels

    int service_count = 3;
    double vnf_capacity = 20.0;

    int request_count = 20;
    IntRange capacity_req_range{4, 8};
    IntRange bandwidth_req_range{2, 10};
    IntRange burstiness_range{1, 4};
    double packet_size = 1.0;
    RealRange delay_req_range{0.010, 0.010};  // seconds

    int paths_per_pair_limit = 8;
};

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Table-driven defaults for the 9-node reference setup.
GeneratorConfig paper_default_config();

// Smaller instances sized so the exact solver stays tractable.
GeneratorConfig desk_config();

// Pure function of (cfg, seed); identical inputs give identical scenarios.
Scenario generate_scenario(const GeneratorConfig& cfg, std::uint64_t seed);

std::string generator_config_to_json(const GeneratorConfig& cfg);
GeneratorConfig generator_config_from_json(const std::string& text);

}  // namespace ccra
