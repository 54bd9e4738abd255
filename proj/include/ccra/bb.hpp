#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccra/allocation.hpp"
#include "ccra/liccra.hpp"
#include "ccra/model.hpp"

namespace ccra {

// One node of the search tree: a tightened box per column.
struct BBNode {
    std::vector<double> lower;
    std::vector<double> upper;
    double bound = 0;  // parent relaxation value
    int depth = 0;
};

// Splits on a fractional column: left child caps it at floor(value), right
// child raises it to ceil(value). Throws if the value is already integral
// within tolerance.
std::pair<BBNode, BBNode> branch(const BBNode& node, int column, double value);

struct BBConfig {
    double time_limit_s = std::numeric_limits<double>::infinity();
    double gap_limit = 0;          // relative; 0 = prove optimality
    long node_limit = 1'000'000;
    // optional starting incumbent (e.g. from the greedy solver)
    std::optional<Solution> warm_solution;
    std::optional<double> warm_cost;
};

struct TracePoint {
    double t_ms = 0;
    double incumbent = 0;  // NaN until one exists
    double bound = 0;
    long nodes = 0;
};

enum class BBStatus { Optimal, Feasible, Infeasible, ModelInfeasible };

struct BBResult {
    BBStatus status = BBStatus::Infeasible;
    std::optional<Solution> incumbent;
    double cost = 0;   // incumbent cost when present
    double bound = 0;  // best lower bound
    double gap = 0;
    long nodes = 0;
    std::vector<TracePoint> trace;
};

BBResult bb_solve(const Scenario& s, const BBConfig& cfg);

std::string trace_to_csv(const std::vector<TracePoint>& trace);

}  // namespace ccra
