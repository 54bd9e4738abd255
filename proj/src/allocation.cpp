#include "ccra/allocation.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace ccra {

namespace {
constexpr double kEps = 1e-9;

// Per-link crossing multiplicity of one assignment (inquiry + response).
void add_crossings(const Scenario& s, const Assignment& a, std::map<int, int>& out) {
    for (int lid : s.path(a.inquiry_path).links) out[lid] += 1;
    for (int lid : s.path(a.response_path).links) out[lid] += 1;
}
}  // namespace

ResidualState ResidualState::fresh(const Scenario& s) {
    ResidualState r;
    r.node_free.reserve(s.nodes.size());
    for (const auto& n : s.nodes) r.node_free.push_back(n.compute_capacity);
    r.link_free.reserve(s.links.size());
    for (const auto& l : s.links) r.link_free.push_back(l.bandwidth);
    r.share_free = s.priorities.bandwidth_share;
    r.queue_free.assign(s.links.size(),
                        std::vector<double>(s.priorities.queue_size.begin(),
                                            s.priorities.queue_size.end()));
    return r;
}

CommitRecord try_commit(const Scenario& s, ResidualState& res, const RequestSpec& r,
                        const Assignment& a) {
    CommitRecord rec;
    const auto key = std::make_pair(r.service, a.node);
    auto vnf_it = res.vnf_free.find(key);
    const bool reuse = vnf_it != res.vnf_free.end();
    const double vnf_cap = s.service(r.service).vnf_capacity;
    if (reuse) {
        if (vnf_it->second < r.capacity_req - kEps) return rec;
    } else {
        if (res.node_free[static_cast<std::size_t>(a.node)] < vnf_cap - kEps) return rec;
        if (vnf_cap < r.capacity_req - kEps) return rec;
    }

    std::map<int, int> crossings;
    add_crossings(s, a, crossings);
    for (const auto& [lid, mult] : crossings) {
        const auto ul = static_cast<std::size_t>(lid);
        const auto uk = static_cast<std::size_t>(a.priority);
        const double demand_bw = r.bandwidth_req * mult;
        const double demand_burst = r.burstiness * mult;
        if (res.link_free[ul] < demand_bw - kEps) return rec;
        if (res.share_free[ul][uk] < demand_bw - kEps) return rec;
        if (res.queue_free[ul][uk] < demand_burst - kEps) return rec;
    }

    if (reuse) {
        vnf_it->second -= r.capacity_req;
    } else {
        res.node_free[static_cast<std::size_t>(a.node)] -= vnf_cap;
        res.vnf_free[key] = vnf_cap - r.capacity_req;
        rec.opened_vnf = true;
    }
    for (const auto& [lid, mult] : crossings) {
        const auto ul = static_cast<std::size_t>(lid);
        const auto uk = static_cast<std::size_t>(a.priority);
        res.link_free[ul] -= r.bandwidth_req * mult;
        res.share_free[ul][uk] -= r.bandwidth_req * mult;
        res.queue_free[ul][uk] -= r.burstiness * mult;
    }
    rec.ok = true;
    return rec;
}

void rollback(const Scenario& s, ResidualState& res, const RequestSpec& r,
              const Assignment& a, const CommitRecord& rec) {
    if (!rec.ok) return;
    const auto key = std::make_pair(r.service, a.node);
    if (rec.opened_vnf) {
        res.vnf_free.erase(key);
        res.node_free[static_cast<std::size_t>(a.node)] += s.service(r.service).vnf_capacity;
    } else {
        res.vnf_free.at(key) += r.capacity_req;
    }
    std::map<int, int> crossings;
    add_crossings(s, a, crossings);
    for (const auto& [lid, mult] : crossings) {
        const auto ul = static_cast<std::size_t>(lid);
        const auto uk = static_cast<std::size_t>(a.priority);
        res.link_free[ul] += r.bandwidth_req * mult;
        res.share_free[ul][uk] += r.bandwidth_req * mult;
        res.queue_free[ul][uk] += r.burstiness * mult;
    }
}

double service_delay(const RequestSpec& r) {
    if (r.capacity_req <= 0) throw std::domain_error("capacity_req must be > 0");
    return r.packet_size / r.capacity_req;
}

double link_delay_exact(const Scenario& s, const Solution& sol, int request_id, int level,
                        int link_id) {
    const auto& me = s.request(request_id);
    double burst_sum = 0;    // priorities <= level, including this flow
    double max_packet = 0;   // priorities > level
    double bw_sum = 0;       // priorities < level
    bool self_counted = false;
    for (const auto& [rid, a] : sol.assignments) {
        if (!s.path_contains(a.inquiry_path, link_id) &&
            !s.path_contains(a.response_path, link_id))
            continue;
        const auto& req = s.request(rid);
        if (rid == request_id) self_counted = true;
        if (a.priority <= level) burst_sum += req.burstiness;
        if (a.priority > level) max_packet = std::max(max_packet, req.packet_size);
        if (a.priority < level) bw_sum += req.bandwidth_req;
    }
    if (!self_counted) burst_sum += me.burstiness;
    const auto& l = s.link(link_id);
    const double denom = l.bandwidth - bw_sum;
    if (denom <= 0)
        throw SaturationError("link " + std::to_string(link_id) +
                              " saturated by higher-priority flows");
    return (burst_sum + max_packet) / denom + me.packet_size / l.bandwidth;
}

double link_delay_bound(const PriorityConfig& pr, const LinkSpec& l, int level) {
    if (level < 0 || level >= pr.level_count) throw std::out_of_range("bad priority level");
    double burst = 0;
    for (int k = 0; k <= level; ++k) burst += pr.queue_size[static_cast<std::size_t>(k)];
    double reserved = 0;
    for (int k = 0; k < level; ++k)
        reserved += pr.bandwidth_share[static_cast<std::size_t>(l.id)][static_cast<std::size_t>(k)];
    const double denom = l.bandwidth - reserved;
    if (denom <= 0)
        throw ConfigurationError("bandwidth shares exhaust link " + std::to_string(l.id));
    return (burst + pr.max_packet) / denom + pr.max_packet / l.bandwidth;
}

std::vector<std::vector<double>> delay_bound_table(const PriorityConfig& pr,
                                                   const std::vector<LinkSpec>& links) {
    std::vector<std::vector<double>> t(static_cast<std::size_t>(pr.level_count));
    for (int k = 0; k < pr.level_count; ++k) {
        auto& row = t[static_cast<std::size_t>(k)];
        row.reserve(links.size());
        for (const auto& l : links) row.push_back(link_delay_bound(pr, l, k));
    }
    return t;
}

DelayReport e2e_delay(const Scenario& s, const Solution& sol, int request_id, DelayMode mode) {
    const auto it = sol.assignments.find(request_id);
    if (it == sol.assignments.end())
        throw std::invalid_argument("request not supported in solution");
    const Assignment& a = it->second;
    DelayReport rep;
    rep.mode = mode;
    rep.compute_delay = service_delay(s.request(request_id));
    rep.total = rep.compute_delay;
    for (int pid : {a.inquiry_path, a.response_path}) {
        for (int lid : s.path(pid).links) {
            const double d = mode == DelayMode::Exact
                                 ? link_delay_exact(s, sol, request_id, a.priority, lid)
                                 : link_delay_bound(s.priorities, s.link(lid), a.priority);
            rep.link_terms.emplace_back(lid, a.priority, d);
            rep.total += d;
        }
    }
    return rep;
}

double allocation_cost(const Scenario& s, int node_id, const PathSpec& inquiry,
                       const PathSpec& response) {
    double cost = s.node(node_id).unit_cost;
    for (int lid : inquiry.links) cost += s.link(lid).unit_cost;
    for (int lid : response.links) cost += s.link(lid).unit_cost;
    return cost;
}

double objective(const Scenario& s, const Solution& sol) {
    double total = 0;
    for (const auto& [rid, a] : sol.assignments)
        total += allocation_cost(s, a.node, s.path(a.inquiry_path), s.path(a.response_path));
    return total;
}

Verdict check_feasibility(const Scenario& s, const Solution& sol, DelayMode mode) {
    Verdict v;
    auto violate = [&v](const std::string& tag, const std::string& entity, double slack) {
        v.feasible = false;
        v.violations.push_back({tag, entity, slack});
    };

    const int V = static_cast<int>(s.nodes.size());
    const int K = s.priorities.level_count;

    for (const auto& [rid, a] : sol.assignments) {
        const std::string ent = "request " + std::to_string(rid);
        const auto& req = s.request(rid);
        if (a.node < 0 || a.node >= V) {
            violate("C1", ent, -1);
            continue;
        }
        if (!sol.vnf_at.count({req.service, a.node})) violate("C2", ent, -1);
        if (a.priority < 0 || a.priority >= K) violate("C5", ent, -1);
        const auto& in = s.path(a.inquiry_path);
        const auto& out = s.path(a.response_path);
        if (in.head != req.entry_node || in.tail != a.node) violate("C6", ent, -1);
        if (out.head != a.node || out.tail != req.entry_node) violate("C7", ent, -1);
    }
    if (!v.feasible) return v;  // structural damage makes load sums meaningless

    // C3: per (service, node) VNF load
    std::map<std::pair<int, int>, double> vnf_load;
    for (const auto& [rid, a] : sol.assignments)
        vnf_load[{s.request(rid).service, a.node}] += s.request(rid).capacity_req;
    for (const auto& [key, load] : vnf_load) {
        const double cap = s.service(key.first).vnf_capacity;
        if (load > cap + kEps)
            violate("C3", "service " + std::to_string(key.first) + " node " +
                        std::to_string(key.second),
                    cap - load);
    }

    // C4: per-node compute load of placed VNFs
    std::vector<double> node_load(s.nodes.size(), 0);
    for (const auto& [srv, node] : sol.vnf_at)
        node_load[static_cast<std::size_t>(node)] += s.service(srv).vnf_capacity;
    for (const auto& n : s.nodes)
        if (node_load[static_cast<std::size_t>(n.id)] > n.compute_capacity + kEps)
            violate("C4", "node " + std::to_string(n.id),
                    n.compute_capacity - node_load[static_cast<std::size_t>(n.id)]);

    // C10/C11 and, in linearized mode, C13': per-link and per-(link,level) loads
    std::vector<double> bw(s.links.size(), 0);
    std::vector<std::vector<double>> bw_k(s.links.size(), std::vector<double>(K, 0));
    std::vector<std::vector<double>> burst_k(s.links.size(), std::vector<double>(K, 0));
    for (const auto& [rid, a] : sol.assignments) {
        const auto& req = s.request(rid);
        std::map<int, int> crossings;
        add_crossings(s, a, crossings);
        for (const auto& [lid, mult] : crossings) {
            const auto ul = static_cast<std::size_t>(lid);
            const auto uk = static_cast<std::size_t>(a.priority);
            bw[ul] += req.bandwidth_req * mult;
            bw_k[ul][uk] += req.bandwidth_req * mult;
            burst_k[ul][uk] += req.burstiness * mult;
        }
    }
    for (const auto& l : s.links) {
        const auto ul = static_cast<std::size_t>(l.id);
        if (bw[ul] > l.bandwidth + kEps)
            violate("C10", "link " + std::to_string(l.id), l.bandwidth - bw[ul]);
        for (int k = 0; k < K; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            const std::string ent =
                "link " + std::to_string(l.id) + " level " + std::to_string(k);
            if (burst_k[ul][uk] > s.priorities.queue_size[uk] + kEps)
                violate("C11", ent, s.priorities.queue_size[uk] - burst_k[ul][uk]);
            if (mode == DelayMode::Linearized &&
                bw_k[ul][uk] > s.priorities.bandwidth_share[ul][uk] + kEps)
                violate("C13p", ent, s.priorities.bandwidth_share[ul][uk] - bw_k[ul][uk]);
        }
    }

    // C15 via the mode's delay model
    for (const auto& [rid, a] : sol.assignments) {
        const auto& req = s.request(rid);
        try {
            const auto rep = e2e_delay(s, sol, rid, mode);
            if (rep.total > req.delay_req + kEps)
                violate("C15", "request " + std::to_string(rid), req.delay_req - rep.total);
        } catch (const SaturationError&) {
            violate("C13", "request " + std::to_string(rid), -1);
        } catch (const ConfigurationError&) {
            violate("C13pp", "request " + std::to_string(rid), -1);
        }
    }
    return v;
}

std::string verdict_to_json(const Verdict& v) {
    nlohmann::ordered_json j;
    j["feasible"] = v.feasible;
    j["violations"] = nlohmann::ordered_json::array();
    for (const auto& viol : v.violations)
        j["violations"].push_back(
            {{"tag", viol.tag}, {"entity", viol.entity}, {"slack", viol.slack}});
    return j.dump(2) + "\n";
}

double reward(double option_cost, double min_cost, double max_cost, bool chi) {
    if (!chi) return 0;
    if (max_cost <= min_cost) return 100.0;
    const double score = 100.0 * (1.0 - (option_cost - min_cost) / (max_cost - min_cost));
    return std::clamp(score, 0.0, 100.0);
}

double accuracy(double eta, double eta_star) {
    if (eta_star <= 0) throw std::domain_error("reference cost must be positive");
    if (eta < eta_star * (1 - 1e-9))
        throw std::domain_error("solution beats the reference optimum");
    return 1.0 - (eta - eta_star) / eta_star;
}

std::string solution_to_json(const Solution& sol) {
    nlohmann::ordered_json j;
    j["assignments"] = nlohmann::ordered_json::array();
    for (const auto& [rid, a] : sol.assignments)
        j["assignments"].push_back({{"request", rid},
                                    {"node", a.node},
                                    {"priority", a.priority},
                                    {"inquiry_path", a.inquiry_path},
                                    {"response_path", a.response_path}});
    j["vnf_at"] = nlohmann::ordered_json::array();
    for (const auto& [srv, node] : sol.vnf_at)
        j["vnf_at"].push_back({{"service", srv}, {"node", node}});
    return j.dump(2) + "\n";
}

Solution solution_from_json(const std::string& text) {
    auto j = nlohmann::ordered_json::parse(text);
    Solution sol;
    for (const auto& e : j.at("assignments")) {
        Assignment a;
        a.node = e.at("node");
        a.priority = e.at("priority");
        a.inquiry_path = e.at("inquiry_path");
        a.response_path = e.at("response_path");
        sol.assignments[e.at("request").get<int>()] = a;
    }
    for (const auto& e : j.at("vnf_at"))
        sol.vnf_at.insert({e.at("service").get<int>(), e.at("node").get<int>()});
    return sol;
}

}  // namespace ccra
