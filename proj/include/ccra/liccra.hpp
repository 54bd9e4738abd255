#pragma once

#include <map>
#include <tuple>
#include <vector>

#include "ccra/allocation.hpp"
#include "ccra/lp.hpp"
#include "ccra/model.hpp"

namespace ccra {

// The integer-linear transformation of the allocation problem: binaries for
// placement (g), VNF opening (z), priority (rho) and directed path choice
// (f), one continuous end-to-end delay column per request, and per-priority
// delay constants standing in for the exact queuing delays.
struct LiccraModel {
    LinearProgram lp;
    bool model_infeasible = false;  // some request has no candidate path pair

    std::map<std::pair<int, int>, int> g;              // (request, node) -> column
    std::map<std::pair<int, int>, int> z;              // (service, node) -> column
    std::map<std::pair<int, int>, int> rho;            // (request, level) -> column
    std::map<std::tuple<int, int, int>, int> f_in;     // (request, path, level)
    std::map<std::tuple<int, int, int>, int> f_out;    // (request, path, level)
    std::map<int, int> delay_col;                      // request -> column
    std::vector<int> binary_cols;                      // all relaxed-binary columns

    // per-(level, link) delay constants used by the delay rows
    std::vector<std::vector<double>> delay_bounds;
};

LiccraModel build_liccra(const Scenario& s);

// Rounds a (near-)integral LP point into a Solution.
Solution decode_liccra(const LiccraModel& model, const Scenario& s,
                       const std::vector<double>& x);

}  // namespace ccra
