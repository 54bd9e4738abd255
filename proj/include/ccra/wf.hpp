#pragma once

#include <map>
#include <string>
#include <vector>

#include "ccra/allocation.hpp"
#include "ccra/model.hpp"

namespace ccra {

// One feasible resource combination for a request against a residual state.
struct AllocationOption {
    int node = -1;
    int priority = -1;
    int inquiry_path = -1;
    int response_path = -1;
    double cost = 0;   // node cost + link costs of both paths
    double delay = 0;  // linearized end-to-end delay
};

// Enumerates every (node, level, inquiry path, response path) combination
// that fits the residual capacities and the request's delay requirement.
// Options come out sorted by (cost, node, priority, inquiry, response).
std::vector<AllocationOption> feasible_allocations(const Scenario& s,
                                                   const ResidualState& res,
                                                   const RequestSpec& r);

// Same enumeration, but when empty reports which constraint family emptied
// the pool: "C6" (no path pair), "C4" (no compute), "C10" (no link budget),
// "C15" (delay requirement).
std::vector<AllocationOption> feasible_allocations_explained(const Scenario& s,
                                                             const ResidualState& res,
                                                             const RequestSpec& r,
                                                             std::string* reason);

// Same enumeration without the delay-requirement cut: options satisfy every
// capacity budget but may violate the request's delay bound (C15).
std::vector<AllocationOption> capacity_feasible_allocations(const Scenario& s,
                                                            const ResidualState& res,
                                                            const RequestSpec& r);

struct Rejection {
    int request = -1;
    std::string reason;
};

struct WFResult {
    Solution solution;
    std::vector<int> accepted;            // processing order
    std::vector<Rejection> rejected;
    std::map<int, AllocationOption> chosen;  // request -> committed option
    double cost = 0;
};

// One-pass greedy: requests in ascending delay requirement, each committed
// to its cheapest feasible option.
WFResult wf_solve(const Scenario& s);

std::string wf_result_to_json(const WFResult& res);

}  // namespace ccra
