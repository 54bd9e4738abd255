#include "ccra/baselines.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace ccra {

namespace {

constexpr double kEps = 1e-9;

// one structurally valid combination, disregarding every capacity budget
struct StructuralOption {
    int node, priority, inquiry_path, response_path;
};

std::vector<StructuralOption> structural_options(const Scenario& s, const RequestSpec& r) {
    std::vector<StructuralOption> out;
    for (const auto& n : s.nodes) {
        const auto in_paths = s.paths_between(r.entry_node, n.id);
        const auto out_paths = s.paths_between(n.id, r.entry_node);
        if (in_paths.empty() || out_paths.empty()) continue;
        for (int pin : in_paths)
            for (int pout : out_paths)
                for (int k = 0; k < s.priorities.level_count; ++k)
                    out.push_back({n.id, k, pin, pout});
    }
    return out;
}

double linearized_delay(const Scenario& s, const std::vector<std::vector<double>>& bounds,
                        const RequestSpec& r, const StructuralOption& o) {
    double delay = service_delay(r);
    for (int pid : {o.inquiry_path, o.response_path})
        for (int lid : s.path(pid).links)
            delay += bounds[static_cast<std::size_t>(o.priority)][static_cast<std::size_t>(lid)];
    return delay;
}

void commit_option(const Scenario& s, ResidualState& residual, WFResult& res,
                   const RequestSpec& r, const AllocationOption& pick) {
    Assignment a{pick.node, pick.priority, pick.inquiry_path, pick.response_path};
    if (!try_commit(s, residual, r, a).ok) {
        res.rejected.push_back({r.id, "commit"});  // enumeration/commit disagreement
        return;
    }
    res.solution.assignments[r.id] = a;
    res.solution.vnf_at.insert({r.service, pick.node});
    res.accepted.push_back(r.id);
    res.chosen[r.id] = pick;
    res.cost += pick.cost;
}

// pick among fully feasible options with a strategy-specific argmin key
template <typename Key>
void solve_by_key(const Scenario& s, const std::vector<int>& order, WFResult& res,
                  Key key) {
    auto residual = ResidualState::fresh(s);
    for (int rid : order) {
        const auto& r = s.request(rid);
        std::string reason;
        auto opts = feasible_allocations_explained(s, residual, r, &reason);
        if (opts.empty()) {
            res.rejected.push_back({rid, reason});
            continue;
        }
        const auto& pick = *std::min_element(
            opts.begin(), opts.end(),
            [&](const AllocationOption& a, const AllocationOption& b) {
                return key(residual, a) < key(residual, b);
            });
        commit_option(s, residual, res, r, pick);
    }
}

std::vector<int> id_order(const Scenario& s) {
    std::vector<int> order;
    for (const auto& r : s.requests) order.push_back(r.id);
    return order;
}

std::vector<int> demand_order(const Scenario& s) {
    auto order = id_order(s);
    std::stable_sort(order.begin(), order.end(), [&s](int a, int b) {
        return s.request(a).capacity_req > s.request(b).capacity_req;
    });
    return order;
}

}  // namespace

BaselineKind baseline_kind_from_string(const std::string& name) {
    if (name == "r") return BaselineKind::Random;
    if (name == "cm") return BaselineKind::CostMin;
    if (name == "dm") return BaselineKind::DelayMin;
    if (name == "fsa") return BaselineKind::FSA;
    if (name == "bsa") return BaselineKind::BSA;
    if (name == "cep") return BaselineKind::CEP;
    throw std::invalid_argument("unknown baseline: " + name);
}

std::string baseline_kind_to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::Random: return "r";
        case BaselineKind::CostMin: return "cm";
        case BaselineKind::DelayMin: return "dm";
        case BaselineKind::FSA: return "fsa";
        case BaselineKind::BSA: return "bsa";
        case BaselineKind::CEP: return "cep";
    }
    throw std::invalid_argument("unknown baseline kind");
}

WFResult baseline_solve(const Scenario& s, BaselineKind kind, std::uint64_t seed) {
    WFResult res;
    std::mt19937_64 rng(seed);
    const auto bounds = delay_bound_table(s.priorities, s.links);

    switch (kind) {
        case BaselineKind::Random: {
            auto residual = ResidualState::fresh(s);
            for (int rid : id_order(s)) {
                const auto& r = s.request(rid);
                auto opts = structural_options(s, r);
                if (opts.empty()) {
                    res.rejected.push_back({rid, "C6"});
                    continue;
                }
                const auto& o = opts[static_cast<std::size_t>(rng() % opts.size())];
                const double delay = linearized_delay(s, bounds, r, o);
                Assignment a{o.node, o.priority, o.inquiry_path, o.response_path};
                if (delay > r.delay_req + kEps || !try_commit(s, residual, r, a).ok) {
                    res.rejected.push_back({rid, "draw"});  // single draw, no retry
                    continue;
                }
                AllocationOption pick{o.node, o.priority, o.inquiry_path, o.response_path,
                                      allocation_cost(s, o.node, s.path(o.inquiry_path),
                                                      s.path(o.response_path)),
                                      delay};
                res.solution.assignments[rid] = a;
                res.solution.vnf_at.insert({r.service, o.node});
                res.accepted.push_back(rid);
                res.chosen[rid] = pick;
                res.cost += pick.cost;
            }
            break;
        }
        case BaselineKind::CostMin: {
            auto residual = ResidualState::fresh(s);
            for (int rid : id_order(s)) {
                const auto& r = s.request(rid);
                // the choice rule sees only cost: cheapest structurally valid
                // node regardless of its remaining capacity, then the cheapest
                // path pair, then the highest priority the capacities admit
                int target = -1;
                for (const auto& o : structural_options(s, r)) {
                    if (target < 0 ||
                        std::make_pair(s.node(o.node).unit_cost, o.node) <
                            std::make_pair(s.node(target).unit_cost, target))
                        target = o.node;
                }
                if (target < 0) {
                    res.rejected.push_back({rid, "C6"});
                    continue;
                }
                auto opts = capacity_feasible_allocations(s, residual, r);
                std::erase_if(opts,
                              [target](const AllocationOption& o) { return o.node != target; });
                if (opts.empty()) {
                    res.rejected.push_back({rid, "C4"});
                    continue;
                }
                const auto& pick = *std::min_element(
                    opts.begin(), opts.end(),
                    [](const AllocationOption& a, const AllocationOption& b) {
                        return std::tie(a.cost, a.inquiry_path, a.response_path, a.priority) <
                               std::tie(b.cost, b.inquiry_path, b.response_path, b.priority);
                    });
                // ...but a commitment that violates the delay requirement
                // would be torn down by the affected tenant: unsupported
                if (pick.delay > r.delay_req + kEps) {
                    res.rejected.push_back({rid, "C15"});
                    continue;
                }
                commit_option(s, residual, res, r, pick);
            }
            break;
        }
        case BaselineKind::DelayMin: {
            auto residual = ResidualState::fresh(s);
            for (int rid : id_order(s)) {
                const auto& r = s.request(rid);
                auto opts = capacity_feasible_allocations(s, residual, r);
                if (opts.empty()) {
                    res.rejected.push_back({rid, "C4"});
                    continue;
                }
                const auto& pick = *std::min_element(
                    opts.begin(), opts.end(),
                    [](const AllocationOption& a, const AllocationOption& b) {
                        return std::tie(a.delay, a.cost, a.node, a.priority, a.inquiry_path,
                                        a.response_path) <
                               std::tie(b.delay, b.cost, b.node, b.priority, b.inquiry_path,
                                        b.response_path);
                    });
                if (pick.delay > r.delay_req + kEps) {
                    res.rejected.push_back({rid, "C15"});
                    continue;
                }
                commit_option(s, residual, res, r, pick);
            }
            break;
        }
        case BaselineKind::FSA: {
            auto residual = ResidualState::fresh(s);
            for (int rid : demand_order(s)) {
                const auto& r = s.request(rid);
                std::string reason;
                auto opts = feasible_allocations_explained(s, residual, r, &reason);
                if (opts.empty()) {
                    res.rejected.push_back({rid, reason});
                    continue;
                }
                commit_option(s, residual, res, r,
                              opts[static_cast<std::size_t>(rng() % opts.size())]);
            }
            break;
        }
        case BaselineKind::BSA:
            solve_by_key(s, demand_order(s), res,
                         [](const ResidualState& residual, const AllocationOption& o) {
                             return std::make_tuple(
                                 -residual.node_free[static_cast<std::size_t>(o.node)], o.cost,
                                 o.node, o.priority, o.inquiry_path, o.response_path);
                         });
            break;
        case BaselineKind::CEP:
            solve_by_key(s, id_order(s), res,
                         [&s](const ResidualState&, const AllocationOption& o) {
                             const double link_cost = o.cost - s.node(o.node).unit_cost;
                             return std::make_tuple(link_cost, o.cost, o.node, o.priority,
                                                    o.inquiry_path, o.response_path);
                         });
            break;
    }
    return res;
}

}  // namespace ccra
