#include "ccra/generator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include <json.hpp>

#include "ccra/paths.hpp"

namespace ccra {

namespace {

long draw_int(std::mt19937_64& rng, const IntRange& r) {
    if (r.hi < r.lo) throw GenerationError("invalid integer range");
    const std::uint64_t span = static_cast<std::uint64_t>(r.hi - r.lo) + 1;
    return r.lo + static_cast<long>(rng() % span);
}

double draw_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw_real(std::mt19937_64& rng, const RealRange& r) {
    if (r.hi < r.lo) throw GenerationError("invalid real range");
    return r.lo + (r.hi - r.lo) * draw_unit(rng);
}

}  // namespace

GeneratorConfig paper_default_config() { return GeneratorConfig{}; }

GeneratorConfig desk_config() {
    GeneratorConfig cfg;
    cfg.node_count = 8;
    cfg.link_count_factor = {2.5, 3.5};
    cfg.bandwidth_range = {1000, 1200};
    cfg.node_capacity_scale = 250.0;
    cfg.priority_count = 2;
    cfg.queue_total = 100.0;  // sized so delay bounds stay within the delay range
    cfg.service_count = 2;
    cfg.vnf_capacity = 120.0;
    cfg.request_count = 20;
    cfg.bandwidth_req_range = {2, 6};
    cfg.burstiness_range = {1, 2};
    cfg.delay_req_range = {0.550, 1.000};
    cfg.paths_per_pair_limit = 2;
    return cfg;
}

Scenario generate_scenario(const GeneratorConfig& cfg, std::uint64_t seed) {
    if (cfg.node_count < 2) throw GenerationError("node_count must be >= 2");
    if (cfg.tier_count < 1 || cfg.tier_count > cfg.node_count)
        throw GenerationError("tier_count out of range");
    if (cfg.entry_tier < 0 || cfg.entry_tier >= cfg.tier_count)
        throw GenerationError("entry_tier out of range");
    if (cfg.priority_count < 1) throw GenerationError("priority_count must be >= 1");
    if (cfg.service_count < 1) throw GenerationError("service_count must be >= 1");

    const int V = cfg.node_count;
    std::mt19937_64 rng(seed);

    Scenario s;
    s.rng_seed = seed;

    // nodes spread evenly across tiers, tier 0 first
    const int per_tier = (V + cfg.tier_count - 1) / cfg.tier_count;
    for (int i = 0; i < V; ++i) {
        NodeSpec n;
        n.id = i;
        n.tier = std::min(i / per_tier, cfg.tier_count - 1);
        n.is_entry = n.tier == cfg.entry_tier;
        s.nodes.push_back(n);
    }

    // link count from the configured distribution, clamped into the band a
    // simple strongly connected digraph can realize
    const long max_links = static_cast<long>(V) * (V - 1);
    const long min_links = 2L * (V - 1);
    IntRange link_draw{static_cast<long>(std::floor(cfg.link_count_factor.lo * V)),
                       static_cast<long>(std::floor(cfg.link_count_factor.hi * V))};
    if (link_draw.lo > max_links)
        throw GenerationError("node_count too small for the link-count distribution");
    long link_count = draw_int(rng, link_draw);
    link_count = std::clamp(link_count, min_links, max_links);

    // spanning tree in both directions keeps every pair mutually reachable
    std::vector<int> order(static_cast<std::size_t>(V));
    for (int i = 0; i < V; ++i) order[static_cast<std::size_t>(i)] = i;
    for (int i = V - 1; i > 0; --i)
        std::swap(order[static_cast<std::size_t>(i)],
                  order[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(i + 1))]);

    std::set<std::pair<int, int>> used;
    auto add_link = [&s, &used](int a, int b) {
        if (a == b || !used.insert({a, b}).second) return false;
        LinkSpec l;
        l.id = static_cast<int>(s.links.size());
        l.from = a;
        l.to = b;
        s.links.push_back(l);
        return true;
    };
    for (int i = 1; i < V; ++i) {
        const int a = order[static_cast<std::size_t>(i)];
        const int b = order[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(i))];
        add_link(a, b);
        add_link(b, a);
    }
    int guard = 0;
    while (static_cast<long>(s.links.size()) < link_count) {
        const int a = static_cast<int>(rng() % static_cast<std::uint64_t>(V));
        const int b = static_cast<int>(rng() % static_cast<std::uint64_t>(V));
        add_link(a, b);
        if (++guard > 1000 * static_cast<int>(link_count))
            throw GenerationError("could not realize link count");
    }

    for (auto& l : s.links) {
        l.bandwidth = static_cast<double>(draw_int(rng, cfg.bandwidth_range));
        l.unit_cost = static_cast<double>(draw_int(rng, cfg.link_cost_range));
    }

    // per-tier capacity and cost; x counts tiers from the core upward
    for (auto& n : s.nodes) {
        const int x_cost = cfg.tier_count - n.tier;
        const int x_cap =
            cfg.capacity_rule == CapacityRule::Table ? x_cost : n.tier + 1;
        n.compute_capacity =
            cfg.node_capacity_scale * (static_cast<double>(x_cap) + draw_unit(rng));
        n.unit_cost = std::pow(cfg.node_cost_base, x_cost + 1);
    }

    s.priorities.level_count = cfg.priority_count;
    s.priorities.queue_size.assign(static_cast<std::size_t>(cfg.priority_count),
                                   cfg.queue_total / cfg.priority_count);
    s.priorities.bandwidth_share.resize(s.links.size());
    for (std::size_t l = 0; l < s.links.size(); ++l)
        s.priorities.bandwidth_share[l].assign(static_cast<std::size_t>(cfg.priority_count),
                                               s.links[l].bandwidth / cfg.priority_count);
    s.priorities.max_packet = cfg.packet_size;

    for (int i = 0; i < cfg.service_count; ++i)
        s.services.push_back({i, cfg.vnf_capacity});

    std::vector<int> entries;
    for (const auto& n : s.nodes)
        if (n.is_entry) entries.push_back(n.id);
    if (entries.empty()) throw GenerationError("no entry nodes in entry tier");

    for (int i = 0; i < cfg.request_count; ++i) {
        RequestSpec r;
        r.id = i;
        r.entry_node = entries[static_cast<std::size_t>(rng() % entries.size())];
        r.service = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.service_count));
        r.capacity_req = static_cast<double>(draw_int(rng, cfg.capacity_req_range));
        r.bandwidth_req = static_cast<double>(draw_int(rng, cfg.bandwidth_req_range));
        r.burstiness = static_cast<double>(draw_int(rng, cfg.burstiness_range));
        r.packet_size = cfg.packet_size;
        r.delay_req = draw_real(rng, cfg.delay_req_range);
        s.requests.push_back(r);
    }

    s.paths = enumerate_paths(s.nodes, s.links, cfg.paths_per_pair_limit);

    auto errs = s.validate();
    if (!errs.empty()) throw GenerationError("generated scenario invalid: " + errs.front());
    return s;
}

std::string generator_config_to_json(const GeneratorConfig& cfg) {
    nlohmann::ordered_json j;
    j["node_count"] = cfg.node_count;
    j["tier_count"] = cfg.tier_count;
    j["entry_tier"] = cfg.entry_tier;
    j["link_count_factor"] = {cfg.link_count_factor.lo, cfg.link_count_factor.hi};
    j["bandwidth_range"] = {cfg.bandwidth_range.lo, cfg.bandwidth_range.hi};
    j["link_cost_range"] = {cfg.link_cost_range.lo, cfg.link_cost_range.hi};
    j["capacity_rule"] = cfg.capacity_rule == CapacityRule::Table ? "table" : "prose";
    j["node_capacity_scale"] = cfg.node_capacity_scale;
    j["node_cost_base"] = cfg.node_cost_base;
    j["priority_count"] = cfg.priority_count;
    j["queue_total"] = cfg.queue_total;
    j["service_count"] = cfg.service_count;
    j["vnf_capacity"] = cfg.vnf_capacity;
    j["request_count"] = cfg.request_count;
    j["capacity_req_range"] = {cfg.capacity_req_range.lo, cfg.capacity_req_range.hi};
    j["bandwidth_req_range"] = {cfg.bandwidth_req_range.lo, cfg.bandwidth_req_range.hi};
    j["burstiness_range"] = {cfg.burstiness_range.lo, cfg.burstiness_range.hi};
    j["packet_size"] = cfg.packet_size;
    j["delay_req_range"] = {cfg.delay_req_range.lo, cfg.delay_req_range.hi};
    j["paths_per_pair_limit"] = cfg.paths_per_pair_limit;
    return j.dump(2) + "\n";
}

GeneratorConfig generator_config_from_json(const std::string& text) {
    auto j = nlohmann::ordered_json::parse(text);
    GeneratorConfig cfg;
    auto get = [&j](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
    };
    get("node_count", cfg.node_count);
    get("tier_count", cfg.tier_count);
    get("entry_tier", cfg.entry_tier);
    if (j.contains("link_count_factor")) {
        cfg.link_count_factor.lo = j["link_count_factor"][0];
        cfg.link_count_factor.hi = j["link_count_factor"][1];
    }
    auto get_int_range = [&j](const char* key, IntRange& r) {
        if (j.contains(key)) {
            r.lo = j[key][0];
            r.hi = j[key][1];
        }
    };
    get_int_range("bandwidth_range", cfg.bandwidth_range);
    get_int_range("link_cost_range", cfg.link_cost_range);
    if (j.contains("capacity_rule"))
        cfg.capacity_rule =
            j["capacity_rule"] == "prose" ? CapacityRule::Prose : CapacityRule::Table;
    get("node_capacity_scale", cfg.node_capacity_scale);
    get("node_cost_base", cfg.node_cost_base);
    get("priority_count", cfg.priority_count);
    get("queue_total", cfg.queue_total);
    get("service_count", cfg.service_count);
    get("vnf_capacity", cfg.vnf_capacity);
    get("request_count", cfg.request_count);
    get_int_range("capacity_req_range", cfg.capacity_req_range);
    get_int_range("bandwidth_req_range", cfg.bandwidth_req_range);
    get_int_range("burstiness_range", cfg.burstiness_range);
    get("packet_size", cfg.packet_size);
    if (j.contains("delay_req_range")) {
        cfg.delay_req_range.lo = j["delay_req_range"][0];
        cfg.delay_req_range.hi = j["delay_req_range"][1];
    }
    get("paths_per_pair_limit", cfg.paths_per_pair_limit);
    return cfg;
}

}  // namespace ccra
