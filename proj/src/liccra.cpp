#include "ccra/liccra.hpp"

#include <string>

namespace ccra {

namespace {

std::string idx2(const char* tag, int a, int b) {
    return std::string(tag) + "[" + std::to_string(a) + "," + std::to_string(b) + "]";
}

std::string idx3(const char* tag, int a, int b, int c) {
    return std::string(tag) + "[" + std::to_string(a) + "," + std::to_string(b) + "," +
           std::to_string(c) + "]";
}

}  // namespace

LiccraModel build_liccra(const Scenario& s) {
    LiccraModel m;
    const int V = static_cast<int>(s.nodes.size());
    const int K = s.priorities.level_count;

    m.delay_bounds = delay_bound_table(s.priorities, s.links);

    // candidate nodes per request: reachable in both directions from the entry
    std::map<std::pair<int, int>, std::vector<int>> cand_in;   // (r, v) -> inquiry paths
    std::map<std::pair<int, int>, std::vector<int>> cand_out;  // (r, v) -> response paths
    for (const auto& r : s.requests) {
        bool any = false;
        for (const auto& n : s.nodes) {
            auto in = s.paths_between(r.entry_node, n.id);
            auto out = s.paths_between(n.id, r.entry_node);
            if (in.empty() || out.empty()) continue;
            cand_in[{r.id, n.id}] = std::move(in);
            cand_out[{r.id, n.id}] = std::move(out);
            any = true;
        }
        if (!any) m.model_infeasible = true;
    }

    auto path_cost = [&s](int pid) {
        double c = 0;
        for (int lid : s.path(pid).links) c += s.link(lid).unit_cost;
        return c;
    };

    // columns: g, z, rho, f (all combinations; non-candidates pinned to zero)
    for (const auto& r : s.requests) {
        for (const auto& n : s.nodes) {
            const bool ok = cand_in.count({r.id, n.id}) != 0;
            const int col = m.lp.add_column(idx2("g", r.id, n.id), VarKind::RelaxedBinary, 0,
                                            ok ? 1 : 0, n.unit_cost);
            m.g[{r.id, n.id}] = col;
            m.binary_cols.push_back(col);
        }
    }
    for (const auto& srv : s.services) {
        for (const auto& n : s.nodes) {
            const int col =
                m.lp.add_column(idx2("z", srv.id, n.id), VarKind::RelaxedBinary, 0, 1, 0);
            m.z[{srv.id, n.id}] = col;
            m.binary_cols.push_back(col);
        }
    }
    for (const auto& r : s.requests) {
        for (int k = 0; k < K; ++k) {
            const int col =
                m.lp.add_column(idx2("rho", r.id, k), VarKind::RelaxedBinary, 0, 1, 0);
            m.rho[{r.id, k}] = col;
            m.binary_cols.push_back(col);
        }
    }
    for (const auto& r : s.requests) {
        const double base_delay = service_delay(r);
        for (const auto& p : s.paths) {
            const bool in_ok = p.head == r.entry_node && cand_in.count({r.id, p.tail}) != 0;
            const bool out_ok = p.tail == r.entry_node && cand_out.count({r.id, p.head}) != 0;
            const double cost = path_cost(p.id);
            for (int k = 0; k < K; ++k) {
                // a path whose own delay bound busts the requirement can never
                // carry the request: pin its column to zero up front
                double path_delay = 0;
                for (int lid : p.links)
                    path_delay += m.delay_bounds[static_cast<std::size_t>(k)]
                                                [static_cast<std::size_t>(lid)];
                const bool delay_ok = base_delay + path_delay <= r.delay_req + 1e-12;
                const int cin = m.lp.add_column(idx3("fi", r.id, p.id, k),
                                                VarKind::RelaxedBinary, 0,
                                                in_ok && delay_ok ? 1 : 0, cost);
                const int cout = m.lp.add_column(idx3("fo", r.id, p.id, k),
                                                 VarKind::RelaxedBinary, 0,
                                                 out_ok && delay_ok ? 1 : 0, cost);
                m.f_in[{r.id, p.id, k}] = cin;
                m.f_out[{r.id, p.id, k}] = cout;
                m.binary_cols.push_back(cin);
                m.binary_cols.push_back(cout);
            }
        }
    }
    for (const auto& r : s.requests)
        m.delay_col[r.id] =
            m.lp.add_column(idx2("D", r.id, 0), VarKind::Continuous, 0, r.delay_req, 0);

    if (m.model_infeasible) return m;

    // C1: every request is assigned exactly one node
    for (const auto& r : s.requests) {
        std::vector<std::pair<int, double>> row;
        for (const auto& n : s.nodes) row.push_back({m.g.at({r.id, n.id}), 1.0});
        m.lp.add_row(std::move(row), RowSense::EQ, 1.0);
    }
    // C2: placement requires the VNF
    for (const auto& r : s.requests)
        for (const auto& n : s.nodes)
            if (cand_in.count({r.id, n.id}))
                m.lp.add_row({{m.g.at({r.id, n.id}), 1.0},
                              {m.z.at({r.service, n.id}), -1.0}},
                             RowSense::LE, 0.0);
    // C3: VNF load cap
    for (const auto& srv : s.services) {
        for (const auto& n : s.nodes) {
            std::vector<std::pair<int, double>> row;
            for (const auto& r : s.requests)
                if (r.service == srv.id)
                    row.push_back({m.g.at({r.id, n.id}), r.capacity_req});
            row.push_back({m.z.at({srv.id, n.id}), -srv.vnf_capacity});
            m.lp.add_row(std::move(row), RowSense::LE, 0.0);
        }
    }
    // C4: node compute cap over opened VNFs
    for (const auto& n : s.nodes) {
        std::vector<std::pair<int, double>> row;
        for (const auto& srv : s.services)
            row.push_back({m.z.at({srv.id, n.id}), srv.vnf_capacity});
        m.lp.add_row(std::move(row), RowSense::LE, n.compute_capacity);
    }
    // C5: exactly one priority level
    for (const auto& r : s.requests) {
        std::vector<std::pair<int, double>> row;
        for (int k = 0; k < K; ++k) row.push_back({m.rho.at({r.id, k}), 1.0});
        m.lp.add_row(std::move(row), RowSense::EQ, 1.0);
    }
    // C6/C7: chosen paths terminate at the chosen node, one per direction
    for (const auto& r : s.requests) {
        for (const auto& n : s.nodes) {
            auto it_in = cand_in.find({r.id, n.id});
            if (it_in == cand_in.end()) continue;
            std::vector<std::pair<int, double>> row_in{{m.g.at({r.id, n.id}), -1.0}};
            for (int pid : it_in->second)
                for (int k = 0; k < K; ++k) row_in.push_back({m.f_in.at({r.id, pid, k}), 1.0});
            m.lp.add_row(std::move(row_in), RowSense::EQ, 0.0);

            std::vector<std::pair<int, double>> row_out{{m.g.at({r.id, n.id}), -1.0}};
            for (int pid : cand_out.at({r.id, n.id}))
                for (int k = 0; k < K; ++k)
                    row_out.push_back({m.f_out.at({r.id, pid, k}), 1.0});
            m.lp.add_row(std::move(row_out), RowSense::EQ, 0.0);
        }
    }
    // C8/C9: path priority agrees with the assigned level, per direction
    for (const auto& r : s.requests) {
        for (int k = 0; k < K; ++k) {
            std::vector<std::pair<int, double>> row_in{{m.rho.at({r.id, k}), -1.0}};
            std::vector<std::pair<int, double>> row_out{{m.rho.at({r.id, k}), -1.0}};
            for (const auto& p : s.paths) {
                if (p.head == r.entry_node && cand_in.count({r.id, p.tail}))
                    row_in.push_back({m.f_in.at({r.id, p.id, k}), 1.0});
                if (p.tail == r.entry_node && cand_out.count({r.id, p.head}))
                    row_out.push_back({m.f_out.at({r.id, p.id, k}), 1.0});
            }
            m.lp.add_row(std::move(row_in), RowSense::EQ, 0.0);
            m.lp.add_row(std::move(row_out), RowSense::EQ, 0.0);
        }
    }
    // C10 / C13' / C11: per-link and per-(link,level) budgets
    std::vector<std::vector<int>> link_paths(s.links.size());
    for (const auto& p : s.paths)
        for (int lid : p.links) link_paths[static_cast<std::size_t>(lid)].push_back(p.id);

    for (const auto& l : s.links) {
        std::vector<std::pair<int, double>> row_bw;
        for (const auto& r : s.requests) {
            for (int pid : link_paths[static_cast<std::size_t>(l.id)]) {
                for (int k = 0; k < K; ++k) {
                    row_bw.push_back({m.f_in.at({r.id, pid, k}), r.bandwidth_req});
                    row_bw.push_back({m.f_out.at({r.id, pid, k}), r.bandwidth_req});
                }
            }
        }
        if (!row_bw.empty()) m.lp.add_row(std::move(row_bw), RowSense::LE, l.bandwidth);

        for (int k = 0; k < K; ++k) {
            std::vector<std::pair<int, double>> row_share, row_queue;
            for (const auto& r : s.requests) {
                for (int pid : link_paths[static_cast<std::size_t>(l.id)]) {
                    row_share.push_back({m.f_in.at({r.id, pid, k}), r.bandwidth_req});
                    row_share.push_back({m.f_out.at({r.id, pid, k}), r.bandwidth_req});
                    row_queue.push_back({m.f_in.at({r.id, pid, k}), r.burstiness});
                    row_queue.push_back({m.f_out.at({r.id, pid, k}), r.burstiness});
                }
            }
            if (row_share.empty()) continue;
            m.lp.add_row(std::move(row_share), RowSense::LE,
                         s.priorities.bandwidth_share[static_cast<std::size_t>(l.id)]
                                                     [static_cast<std::size_t>(k)]);
            m.lp.add_row(std::move(row_queue), RowSense::LE,
                         s.priorities.queue_size[static_cast<std::size_t>(k)]);
        }
    }
    // C14': end-to-end delay assembled from per-level link constants; the
    // delay column's upper bound is the request's requirement (C15)
    for (const auto& r : s.requests) {
        std::vector<std::pair<int, double>> row{{m.delay_col.at(r.id), 1.0}};
        for (const auto& p : s.paths) {
            for (int k = 0; k < K; ++k) {
                double d = 0;
                for (int lid : p.links)
                    d += m.delay_bounds[static_cast<std::size_t>(k)]
                                       [static_cast<std::size_t>(lid)];
                if (d == 0) continue;
                auto iti = m.f_in.find({r.id, p.id, k});
                auto ito = m.f_out.find({r.id, p.id, k});
                row.push_back({iti->second, -d});
                row.push_back({ito->second, -d});
            }
        }
        m.lp.add_row(std::move(row), RowSense::EQ, service_delay(r));
    }
    return m;
}

Solution decode_liccra(const LiccraModel& model, const Scenario& s,
                       const std::vector<double>& x) {
    Solution sol;
    auto on = [&x](int col) { return x[static_cast<std::size_t>(col)] > 0.5; };
    for (const auto& [key, col] : model.z)
        if (on(col)) sol.vnf_at.insert(key);
    for (const auto& r : s.requests) {
        Assignment a;
        for (const auto& n : s.nodes)
            if (on(model.g.at({r.id, n.id}))) a.node = n.id;
        if (a.node < 0) continue;
        for (int k = 0; k < s.priorities.level_count; ++k)
            if (on(model.rho.at({r.id, k}))) a.priority = k;
        for (const auto& [key, col] : model.f_in)
            if (std::get<0>(key) == r.id && on(col)) a.inquiry_path = std::get<1>(key);
        for (const auto& [key, col] : model.f_out)
            if (std::get<0>(key) == r.id && on(col)) a.response_path = std::get<1>(key);
        sol.assignments[r.id] = a;
    }
    return sol;
}

}  // namespace ccra
