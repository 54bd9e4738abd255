#include "ccra/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ccra {

using ordered_json = nlohmann::ordered_json;

int Scenario::tier_count() const {
    int t = 0;
    for (const auto& n : nodes) t = std::max(t, n.tier + 1);
    return t;
}

std::vector<int> Scenario::entry_nodes() const {
    std::vector<int> out;
    for (const auto& n : nodes)
        if (n.is_entry) out.push_back(n.id);
    return out;
}

std::vector<int> Scenario::paths_between(int head, int tail) const {
    std::vector<int> out;
    for (const auto& p : paths)
        if (p.head == head && p.tail == tail) out.push_back(p.id);
    return out;
}

namespace {
template <class T>
const T& lookup(const std::vector<T>& v, int id, const char* what) {
    if (id < 0 || id >= static_cast<int>(v.size()))
        throw std::out_of_range(std::string("unknown ") + what + " id " + std::to_string(id));
    return v[static_cast<std::size_t>(id)];
}
}  // namespace

const PathSpec& Scenario::path(int id) const { return lookup(paths, id, "path"); }
const LinkSpec& Scenario::link(int id) const { return lookup(links, id, "link"); }
const NodeSpec& Scenario::node(int id) const { return lookup(nodes, id, "node"); }
const ServiceSpec& Scenario::service(int id) const { return lookup(services, id, "service"); }
const RequestSpec& Scenario::request(int id) const { return lookup(requests, id, "request"); }

bool Scenario::path_contains(int path_id, int link_id) const {
    const PathSpec& p = path(path_id);
    link(link_id);
    return std::find(p.links.begin(), p.links.end(), link_id) != p.links.end();
}

std::vector<std::string> Scenario::validate() const {
    std::vector<std::string> errs;
    auto err = [&errs](const std::string& m) { errs.push_back(m); };

    const int tiers = tier_count();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.id != static_cast<int>(i)) err("node id mismatch at index " + std::to_string(i));
        if (n.compute_capacity < 0) err("node " + std::to_string(n.id) + ": negative capacity");
        if (n.unit_cost <= 0) err("node " + std::to_string(n.id) + ": unit_cost must be > 0");
        if (n.tier < 0 || n.tier >= tiers) err("node " + std::to_string(n.id) + ": tier out of range");
    }
    for (std::size_t i = 0; i < links.size(); ++i) {
        const auto& l = links[i];
        if (l.id != static_cast<int>(i)) err("link id mismatch at index " + std::to_string(i));
        if (l.bandwidth <= 0) err("link " + std::to_string(l.id) + ": bandwidth must be > 0");
        if (l.unit_cost <= 0) err("link " + std::to_string(l.id) + ": unit_cost must be > 0");
        if (l.from == l.to) err("link " + std::to_string(l.id) + ": self loop");
        if (l.from < 0 || l.from >= static_cast<int>(nodes.size()) ||
            l.to < 0 || l.to >= static_cast<int>(nodes.size()))
            err("link " + std::to_string(l.id) + ": endpoint out of range");
    }
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        if (p.id != static_cast<int>(i)) err("path id mismatch at index " + std::to_string(i));
        if (p.links.empty()) {
            err("path " + std::to_string(p.id) + ": must have at least one link");
            continue;
        }
        int at = p.head;
        std::set<int> seen{at};
        bool ok = true;
        for (int lid : p.links) {
            if (lid < 0 || lid >= static_cast<int>(links.size())) {
                err("path " + std::to_string(p.id) + ": unknown link");
                ok = false;
                break;
            }
            const auto& l = links[static_cast<std::size_t>(lid)];
            if (l.from != at) {
                err("path " + std::to_string(p.id) + ": links do not chain");
                ok = false;
                break;
            }
            at = l.to;
            if (!seen.insert(at).second) {
                err("path " + std::to_string(p.id) + ": repeated node");
                ok = false;
                break;
            }
        }
        if (ok && at != p.tail) err("path " + std::to_string(p.id) + ": tail mismatch");
    }

    const auto& pr = priorities;
    if (pr.level_count < 1) err("priority level_count must be >= 1");
    if (static_cast<int>(pr.queue_size.size()) != pr.level_count)
        err("queue_size size mismatch");
    for (double q : pr.queue_size)
        if (q <= 0) err("queue_size entries must be > 0");
    if (pr.bandwidth_share.size() != links.size()) {
        err("bandwidth_share must have one row per link");
    } else {
        for (std::size_t l = 0; l < links.size(); ++l) {
            const auto& row = pr.bandwidth_share[l];
            if (static_cast<int>(row.size()) != pr.level_count) {
                err("bandwidth_share row size mismatch at link " + std::to_string(l));
                continue;
            }
            double sum = 0;
            for (double v : row) sum += v;
            if (sum > links[l].bandwidth + 1e-9)
                err("bandwidth_share exceeds link bandwidth at link " + std::to_string(l));
        }
    }
    if (pr.max_packet <= 0) err("max_packet must be > 0");

    for (std::size_t i = 0; i < services.size(); ++i) {
        if (services[i].id != static_cast<int>(i)) err("service id mismatch");
        if (services[i].vnf_capacity <= 0) err("service " + std::to_string(i) + ": vnf_capacity must be > 0");
    }
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const auto& r = requests[i];
        const std::string tag = "request " + std::to_string(r.id);
        if (r.id != static_cast<int>(i)) err("request id mismatch at index " + std::to_string(i));
        if (r.entry_node < 0 || r.entry_node >= static_cast<int>(nodes.size()))
            err(tag + ": entry node out of range");
        else if (!nodes[static_cast<std::size_t>(r.entry_node)].is_entry)
            err(tag + ": entry node is not an entry point");
        if (r.service < 0 || r.service >= static_cast<int>(services.size()))
            err(tag + ": unknown service");
        if (r.capacity_req <= 0) err(tag + ": capacity_req must be > 0");
        if (r.bandwidth_req <= 0) err(tag + ": bandwidth_req must be > 0");
        if (r.delay_req <= 0) err(tag + ": delay_req must be > 0");
        if (r.burstiness <= 0) err(tag + ": burstiness must be > 0");
        if (r.packet_size <= 0) err(tag + ": packet_size must be > 0");
        if (r.packet_size > pr.max_packet + 1e-12) err(tag + ": packet_size exceeds max_packet");
        // every request needs at least one candidate inquiry/response path pair
        bool has_pair = false;
        for (const auto& n : nodes) {
            if (n.id == r.entry_node) continue;
            if (!paths_between(r.entry_node, n.id).empty() &&
                !paths_between(n.id, r.entry_node).empty()) {
                has_pair = true;
                break;
            }
        }
        if (!has_pair) err(tag + ": no candidate path pair in scenario");
    }
    return errs;
}

std::string scenario_to_json(const Scenario& s) {
    ordered_json j;
    j["rng_seed"] = s.rng_seed;
    j["nodes"] = ordered_json::array();
    for (const auto& n : s.nodes)
        j["nodes"].push_back({{"id", n.id},
                              {"tier", n.tier},
                              {"compute_capacity", n.compute_capacity},
                              {"unit_cost", n.unit_cost},
                              {"is_entry", n.is_entry}});
    j["links"] = ordered_json::array();
    for (const auto& l : s.links)
        j["links"].push_back({{"id", l.id},
                              {"from", l.from},
                              {"to", l.to},
                              {"bandwidth", l.bandwidth},
                              {"unit_cost", l.unit_cost}});
    j["paths"] = ordered_json::array();
    for (const auto& p : s.paths)
        j["paths"].push_back({{"id", p.id}, {"head", p.head}, {"tail", p.tail}, {"links", p.links}});
    j["priorities"] = {{"level_count", s.priorities.level_count},
                       {"queue_size", s.priorities.queue_size},
                       {"bandwidth_share", s.priorities.bandwidth_share},
                       {"max_packet", s.priorities.max_packet}};
    j["services"] = ordered_json::array();
    for (const auto& sv : s.services)
        j["services"].push_back({{"id", sv.id}, {"vnf_capacity", sv.vnf_capacity}});
    j["requests"] = ordered_json::array();
    for (const auto& r : s.requests)
        j["requests"].push_back({{"id", r.id},
                                 {"entry_node", r.entry_node},
                                 {"service", r.service},
                                 {"capacity_req", r.capacity_req},
                                 {"bandwidth_req", r.bandwidth_req},
                                 {"delay_req", r.delay_req},
                                 {"burstiness", r.burstiness},
                                 {"packet_size", r.packet_size}});
    return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
    auto j = ordered_json::parse(text);
    Scenario s;
    s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    for (const auto& e : j.at("nodes")) {
        NodeSpec n;
        n.id = e.at("id");
        n.tier = e.at("tier");
        n.compute_capacity = e.at("compute_capacity");
        n.unit_cost = e.at("unit_cost");
        n.is_entry = e.at("is_entry");
        s.nodes.push_back(n);
    }
    for (const auto& e : j.at("links")) {
        LinkSpec l;
        l.id = e.at("id");
        l.from = e.at("from");
        l.to = e.at("to");
        l.bandwidth = e.at("bandwidth");
        l.unit_cost = e.at("unit_cost");
        s.links.push_back(l);
    }
    for (const auto& e : j.at("paths")) {
        PathSpec p;
        p.id = e.at("id");
        p.head = e.at("head");
        p.tail = e.at("tail");
        p.links = e.at("links").get<std::vector<int>>();
        s.paths.push_back(p);
    }
    const auto& pj = j.at("priorities");
    s.priorities.level_count = pj.at("level_count");
    s.priorities.queue_size = pj.at("queue_size").get<std::vector<double>>();
    s.priorities.bandwidth_share = pj.at("bandwidth_share").get<std::vector<std::vector<double>>>();
    s.priorities.max_packet = pj.at("max_packet");
    for (const auto& e : j.at("services")) {
        ServiceSpec sv;
        sv.id = e.at("id");
        sv.vnf_capacity = e.at("vnf_capacity");
        s.services.push_back(sv);
    }
    for (const auto& e : j.at("requests")) {
        RequestSpec r;
        r.id = e.at("id");
        r.entry_node = e.at("entry_node");
        r.service = e.at("service");
        r.capacity_req = e.at("capacity_req");
        r.bandwidth_req = e.at("bandwidth_req");
        r.delay_req = e.at("delay_req");
        r.burstiness = e.at("burstiness");
        r.packet_size = e.at("packet_size");
        s.requests.push_back(r);
    }
    return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << scenario_to_json(s);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return scenario_from_json(ss.str());
}

}  // namespace ccra
