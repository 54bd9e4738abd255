#include "ccra/bb.hpp"

#include <chrono>
#include <cmath>
#include <queue>
#include <sstream>

namespace ccra {

namespace {
constexpr double kIntTol = 1e-6;

double frac_part(double v) { return std::abs(v - std::round(v)); }
}  // namespace

std::pair<BBNode, BBNode> branch(const BBNode& node, int column, double value) {
    if (frac_part(value) <= kIntTol)
        throw std::invalid_argument("branching value is integral within tolerance");
    BBNode down = node;
    BBNode up = node;
    const auto c = static_cast<std::size_t>(column);
    down.upper[c] = std::floor(value);
    up.lower[c] = std::ceil(value);
    down.depth = up.depth = node.depth + 1;
    return {std::move(down), std::move(up)};
}

BBResult bb_solve(const Scenario& s, const BBConfig& cfg) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed_ms = [&t0] {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    BBResult res;
    auto model = build_liccra(s);
    if (model.model_infeasible) {
        res.status = BBStatus::ModelInfeasible;
        return res;
    }
    const auto& lp = model.lp;

    double inc_cost = std::numeric_limits<double>::infinity();
    if (cfg.warm_solution && cfg.warm_cost) {
        res.incumbent = cfg.warm_solution;
        inc_cost = *cfg.warm_cost;
    }

    BBNode root;
    root.lower.reserve(lp.cols.size());
    root.upper.reserve(lp.cols.size());
    for (const auto& c : lp.cols) {
        root.lower.push_back(c.lower);
        root.upper.push_back(c.upper);
    }
    root.bound = -std::numeric_limits<double>::infinity();

    // best-bound first; FIFO ids break ties deterministically
    struct Entry {
        double bound;
        long id;
    };
    auto cmp = [](const Entry& a, const Entry& b) {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> open(cmp);
    std::vector<BBNode> store;
    store.push_back(std::move(root));
    open.push({store[0].bound, 0});

    // global lower bound = cheapest open node (the heap is min-on-bound),
    // capped by the incumbent
    auto current_bound = [&open, &inc_cost] {
        double lb = inc_cost;
        if (!open.empty()) lb = std::min(lb, open.top().bound);
        return lb;
    };
    auto log_point = [&](double bound) {
        res.trace.push_back({elapsed_ms(),
                             res.incumbent ? inc_cost : std::nan(""), bound, res.nodes});
    };

    bool stopped_early = false;

    while (!open.empty()) {
        const auto entry = open.top();
        open.pop();
        BBNode node = std::move(store[static_cast<std::size_t>(entry.id)]);

        if (res.incumbent && std::isfinite(entry.bound)) {
            const double gap =
                (inc_cost - entry.bound) / std::max(std::abs(inc_cost), 1e-9);
            if (entry.bound >= inc_cost - 1e-9 || gap <= cfg.gap_limit) {
                // best-bound order: every remaining node is at least this bound
                res.bound = std::min(inc_cost, entry.bound);
                res.cost = inc_cost;
                res.gap = std::max(0.0, gap);
                res.status = BBStatus::Optimal;
                log_point(res.bound);
                return res;
            }
        }
        if (elapsed_ms() / 1000.0 > cfg.time_limit_s || res.nodes >= cfg.node_limit) {
            stopped_early = true;
            break;
        }

        ++res.nodes;
        auto sol = solve_lp_bounded(lp, node.lower, node.upper);
        if (sol.status != LpStatus::Optimal) continue;  // pruned by infeasibility
        if (!std::isfinite(sol.objective))
            throw std::runtime_error("relaxation returned a non-finite value");
        if (sol.objective >= inc_cost - 1e-9) continue;  // pruned by bound

        // most fractional binary column; structural variables (placement,
        // activation, priority) before path selectors, ties by lowest index
        const auto structural_end = static_cast<int>(
            s.requests.size() * s.nodes.size() + s.services.size() * s.nodes.size() +
            s.requests.size() * static_cast<std::size_t>(s.priorities.level_count));
        int frac_col = -1;
        double frac_best = kIntTol;
        bool frac_structural = false;
        for (int col : model.binary_cols) {
            const double f = frac_part(sol.x[static_cast<std::size_t>(col)]);
            if (f <= kIntTol) continue;
            const bool structural = col < structural_end;
            if (structural != frac_structural) {
                if (!structural) continue;  // keep the structural pick
                frac_structural = true;
                frac_best = f;
                frac_col = col;
            } else if (f > frac_best + 1e-12) {
                frac_best = f;
                frac_col = col;
            }
        }
        if (frac_col < 0) {
            // integer feasible: new incumbent
            res.incumbent = decode_liccra(model, s, sol.x);
            inc_cost = sol.objective;
            log_point(current_bound());
            continue;
        }
        auto [down, up] = branch(node, frac_col, sol.x[static_cast<std::size_t>(frac_col)]);
        down.bound = up.bound = sol.objective;
        store.push_back(std::move(down));
        open.push({sol.objective, static_cast<long>(store.size()) - 1});
        store.push_back(std::move(up));
        open.push({sol.objective, static_cast<long>(store.size()) - 1});
    }

    if (res.incumbent) {
        res.cost = inc_cost;
        res.bound = stopped_early ? current_bound() : inc_cost;
        if (!std::isfinite(res.bound)) res.bound = inc_cost;  // root never solved
        res.gap = (inc_cost - res.bound) / std::max(std::abs(inc_cost), 1e-9);
        res.status = res.gap <= cfg.gap_limit + 1e-12 ? BBStatus::Optimal : BBStatus::Feasible;
    } else if (stopped_early) {
        res.status = BBStatus::Feasible;  // out of budget with nothing to show
        res.bound = current_bound();
        if (!std::isfinite(res.bound)) res.bound = 0;
    } else {
        res.status = BBStatus::Infeasible;  // exhausted without an integer point
        res.bound = std::numeric_limits<double>::infinity();
    }
    log_point(res.bound);
    return res;
}

std::string trace_to_csv(const std::vector<TracePoint>& trace) {
    std::ostringstream out;
    out << "t_ms,incumbent,bound,nodes\n";
    out.setf(std::ios::fixed);
    out.precision(6);
    for (const auto& p : trace) {
        out << p.t_ms << ",";
        if (std::isnan(p.incumbent))
            out << "";
        else
            out << p.incumbent;
        out << "," << p.bound << "," << p.nodes << "\n";
    }
    return out.str();
}

}  // namespace ccra
