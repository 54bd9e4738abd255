#include "ccra/wf.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

namespace ccra {

namespace {
constexpr double kEps = 1e-9;

bool links_fit(const Scenario& s, const ResidualState& res, const RequestSpec& r,
               int level, int inquiry, int response) {
    std::map<int, int> mult;
    for (int lid : s.path(inquiry).links) mult[lid] += 1;
    for (int lid : s.path(response).links) mult[lid] += 1;
    for (const auto& [lid, m] : mult) {
        const auto ul = static_cast<std::size_t>(lid);
        const auto uk = static_cast<std::size_t>(level);
        if (res.link_free[ul] < r.bandwidth_req * m - kEps) return false;
        if (res.share_free[ul][uk] < r.bandwidth_req * m - kEps) return false;
        if (res.queue_free[ul][uk] < r.burstiness * m - kEps) return false;
    }
    return true;
}

}  // namespace

namespace {

std::vector<AllocationOption> enumerate_allocations(const Scenario& s,
                                                    const ResidualState& res,
                                                    const RequestSpec& r, bool respect_delay,
                                                    std::string* reason);

}  // namespace

std::vector<AllocationOption> feasible_allocations_explained(const Scenario& s,
                                                             const ResidualState& res,
                                                             const RequestSpec& r,
                                                             std::string* reason) {
    return enumerate_allocations(s, res, r, /*respect_delay=*/true, reason);
}

std::vector<AllocationOption> capacity_feasible_allocations(const Scenario& s,
                                                            const ResidualState& res,
                                                            const RequestSpec& r) {
    return enumerate_allocations(s, res, r, /*respect_delay=*/false, nullptr);
}

namespace {

std::vector<AllocationOption> enumerate_allocations(const Scenario& s,
                                                    const ResidualState& res,
                                                    const RequestSpec& r, bool respect_delay,
                                                    std::string* reason) {
    const auto bounds = delay_bound_table(s.priorities, s.links);
    const double compute_delay = service_delay(r);
    const double vnf_cap = s.service(r.service).vnf_capacity;

    bool any_pair = false, any_compute = false, any_links = false;
    std::vector<AllocationOption> out;
    for (const auto& n : s.nodes) {
        const auto in_paths = s.paths_between(r.entry_node, n.id);
        const auto out_paths = s.paths_between(n.id, r.entry_node);
        if (in_paths.empty() || out_paths.empty()) continue;
        any_pair = true;

        const auto vnf_it = res.vnf_free.find({r.service, n.id});
        const bool reuse = vnf_it != res.vnf_free.end();
        const bool compute_ok =
            reuse ? vnf_it->second >= r.capacity_req - kEps
                  : res.node_free[static_cast<std::size_t>(n.id)] >= vnf_cap - kEps &&
                        vnf_cap >= r.capacity_req - kEps;
        if (!compute_ok) continue;
        any_compute = true;

        for (int pin : in_paths) {
            for (int pout : out_paths) {
                for (int k = 0; k < s.priorities.level_count; ++k) {
                    if (!links_fit(s, res, r, k, pin, pout)) continue;
                    any_links = true;
                    double delay = compute_delay;
                    for (int pid : {pin, pout})
                        for (int lid : s.path(pid).links)
                            delay += bounds[static_cast<std::size_t>(k)]
                                           [static_cast<std::size_t>(lid)];
                    if (respect_delay && delay > r.delay_req + kEps) continue;
                    AllocationOption opt;
                    opt.node = n.id;
                    opt.priority = k;
                    opt.inquiry_path = pin;
                    opt.response_path = pout;
                    opt.cost = allocation_cost(s, n.id, s.path(pin), s.path(pout));
                    opt.delay = delay;
                    out.push_back(opt);
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const AllocationOption& a, const AllocationOption& b) {
        return std::tie(a.cost, a.node, a.priority, a.inquiry_path, a.response_path) <
               std::tie(b.cost, b.node, b.priority, b.inquiry_path, b.response_path);
    });
    if (reason) {
        if (!out.empty())
            reason->clear();
        else if (!any_pair)
            *reason = "C6";
        else if (!any_compute)
            *reason = "C4";
        else if (!any_links)
            *reason = "C10";
        else
            *reason = "C15";
    }
    return out;
}

}  // namespace

std::vector<AllocationOption> feasible_allocations(const Scenario& s,
                                                   const ResidualState& res,
                                                   const RequestSpec& r) {
    return feasible_allocations_explained(s, res, r, nullptr);
}

WFResult wf_solve(const Scenario& s) {
    WFResult res;
    auto residual = ResidualState::fresh(s);

    std::vector<int> order;
    for (const auto& r : s.requests) order.push_back(r.id);
    std::sort(order.begin(), order.end(), [&s](int a, int b) {
        const auto& ra = s.request(a);
        const auto& rb = s.request(b);
        return std::tie(ra.delay_req, ra.id) < std::tie(rb.delay_req, rb.id);
    });

    for (int rid : order) {
        const auto& r = s.request(rid);
        std::string reason;
        auto opts = feasible_allocations_explained(s, residual, r, &reason);
        if (opts.empty()) {
            res.rejected.push_back({rid, reason});
            continue;
        }
        const auto& pick = opts.front();  // already cost-then-id ordered
        Assignment a{pick.node, pick.priority, pick.inquiry_path, pick.response_path};
        auto rec = try_commit(s, residual, r, a);
        if (!rec.ok) {
            // cannot happen if enumeration and commit agree; fail loudly
            res.rejected.push_back({rid, "commit"});
            continue;
        }
        res.solution.assignments[rid] = a;
        res.solution.vnf_at.insert({r.service, pick.node});
        res.accepted.push_back(rid);
        res.chosen[rid] = pick;
        res.cost += pick.cost;
    }
    return res;
}

std::string wf_result_to_json(const WFResult& res) {
    nlohmann::ordered_json j;
    j["cost"] = res.cost;
    j["accepted"] = res.accepted;
    j["rejected"] = nlohmann::ordered_json::array();
    for (const auto& rej : res.rejected)
        j["rejected"].push_back({{"request", rej.request}, {"reason", rej.reason}});
    j["solution"] = nlohmann::ordered_json::parse(solution_to_json(res.solution));
    return j.dump(2) + "\n";
}

}  // namespace ccra
