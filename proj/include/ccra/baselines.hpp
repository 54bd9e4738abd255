#pragma once

#include <cstdint>
#include <string>

#include "ccra/wf.hpp"

namespace ccra {

// Reference allocation strategies. Selection rules differ; physical
// capacities are never oversubscribed by any of them.
enum class BaselineKind {
    Random,     // one uniform draw over structurally valid options, commit or reject
    CostMin,    // cheapest node + cheapest paths, delay ignored when choosing
    DelayMin,   // smallest linearized delay among capacity-feasible options
    FSA,        // descending capacity demand, random feasible option
    BSA,        // descending capacity demand, node with most compute left
    CEP,        // cheapest total link cost among feasible options
};

// Accepts "r", "cm", "dm", "fsa", "bsa", "cep"; throws on anything else.
BaselineKind baseline_kind_from_string(const std::string& name);
std::string baseline_kind_to_string(BaselineKind kind);

// The seed only matters for the randomized strategies (Random, FSA).
WFResult baseline_solve(const Scenario& s, BaselineKind kind, std::uint64_t seed = 0);

}  // namespace ccra
