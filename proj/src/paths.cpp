#include "ccra/paths.hpp"

#include <algorithm>
#include <queue>

namespace ccra {

namespace {

struct Partial {
    double cost = 0;
    std::vector<int> links;
    std::vector<bool> visited;
    int at = -1;
};

// Final ordering key; prefix keys never exceed extension keys (positive
// costs), so best-first pops completed paths already in order.
bool worse(const Partial& a, const Partial& b) {
    if (a.cost != b.cost) return a.cost > b.cost;
    if (a.links.size() != b.links.size()) return a.links.size() > b.links.size();
    return a.links > b.links;
}

}  // namespace

std::vector<PathSpec> enumerate_pair_paths(const std::vector<NodeSpec>& nodes,
                                           const std::vector<LinkSpec>& links,
                                           int head, int tail, int per_pair_limit) {
    std::vector<PathSpec> out;
    if (per_pair_limit < 1) throw std::invalid_argument("per_pair_limit must be >= 1");
    if (head == tail) return out;

    std::vector<std::vector<int>> outgoing(nodes.size());
    for (const auto& l : links) outgoing[static_cast<std::size_t>(l.from)].push_back(l.id);
    for (auto& v : outgoing)
        std::sort(v.begin(), v.end());

    std::priority_queue<Partial, std::vector<Partial>, decltype(&worse)> queue(&worse);
    Partial root;
    root.at = head;
    root.visited.assign(nodes.size(), false);
    root.visited[static_cast<std::size_t>(head)] = true;
    queue.push(std::move(root));

    while (!queue.empty() && static_cast<int>(out.size()) < per_pair_limit) {
        Partial cur = queue.top();
        queue.pop();
        if (cur.at == tail) {
            PathSpec p;
            p.head = head;
            p.tail = tail;
            p.links = cur.links;
            out.push_back(std::move(p));
            continue;
        }
        for (int lid : outgoing[static_cast<std::size_t>(cur.at)]) {
            const auto& l = links[static_cast<std::size_t>(lid)];
            if (cur.visited[static_cast<std::size_t>(l.to)]) continue;
            Partial next = cur;
            next.cost += l.unit_cost;
            next.links.push_back(lid);
            next.visited[static_cast<std::size_t>(l.to)] = true;
            next.at = l.to;
            queue.push(std::move(next));
        }
    }
    return out;
}

std::vector<PathSpec> enumerate_paths(const std::vector<NodeSpec>& nodes,
                                      const std::vector<LinkSpec>& links,
                                      int per_pair_limit) {
    std::vector<PathSpec> all;
    for (const auto& a : nodes) {
        for (const auto& b : nodes) {
            if (a.id == b.id) continue;
            auto pair_paths = enumerate_pair_paths(nodes, links, a.id, b.id, per_pair_limit);
            for (auto& p : pair_paths) {
                p.id = static_cast<int>(all.size());
                all.push_back(std::move(p));
            }
        }
    }
    return all;
}

}  // namespace ccra
