#pragma once

#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "ccra/model.hpp"

namespace ccra {

// One supported request's allocation: node g, priority rho, and the chosen
// inquiry/response paths (the nonzero f-> and f<- entries).
struct Assignment {
    int node = -1;
    int priority = -1;
    int inquiry_path = -1;
    int response_path = -1;
};

struct Solution {
    std::map<int, Assignment> assignments;   // request id -> assignment
    std::set<std::pair<int, int>> vnf_at;    // (service, node) pairs with z=1

    bool supports(int request_id) const { return assignments.count(request_id) != 0; }
};

// Remaining capacities during incremental allocation; all entries stay >= 0.
struct ResidualState {
    std::vector<double> node_free;                      // per node
    std::map<std::pair<int, int>, double> vnf_free;     // (service, node) -> spare
    std::vector<double> link_free;                      // per link
    std::vector<std::vector<double>> share_free;        // [link][level]
    std::vector<std::vector<double>> queue_free;        // [link][level]

    static ResidualState fresh(const Scenario& s);
};

struct CommitRecord {
    bool ok = false;
    bool opened_vnf = false;
};

// Commits the assignment against the residual if no capacity goes negative;
// on failure the residual is left untouched.
CommitRecord try_commit(const Scenario& s, ResidualState& res, const RequestSpec& r,
                        const Assignment& a);
void rollback(const Scenario& s, ResidualState& res, const RequestSpec& r,
              const Assignment& a, const CommitRecord& rec);

enum class DelayMode { Exact, Linearized };

struct DelayReport {
    std::vector<std::tuple<int, int, double>> link_terms;  // (link, level, delay)
    double compute_delay = 0;
    double total = 0;
    DelayMode mode = DelayMode::Exact;
};

struct SaturationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigurationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Computing delay: packet_size / capacity_req.
double service_delay(const RequestSpec& r);

// Worst-case ATS delay of request r's flow at the given priority level on
// link l, given the other flows currently routed in `sol`.
double link_delay_exact(const Scenario& s, const Solution& sol, int request_id, int level,
                        int link_id);

// Flow-independent per-level delay upper bound on a link.
double link_delay_bound(const PriorityConfig& pr, const LinkSpec& l, int level);

// All bounds at once; indexed [level][link].
std::vector<std::vector<double>> delay_bound_table(const PriorityConfig& pr,
                                                   const std::vector<LinkSpec>& links);

DelayReport e2e_delay(const Scenario& s, const Solution& sol, int request_id, DelayMode mode);

// Total cost of all supported requests: per-request node cost plus per-link
// costs of both paths (a shared link counts once per direction).
double objective(const Scenario& s, const Solution& sol);

// Cost contribution of a single request's allocation.
double allocation_cost(const Scenario& s, int node_id, const PathSpec& inquiry,
                       const PathSpec& response);

struct Violation {
    std::string tag;      // "C1".."C15", "C13p", "C13pp", "C14p"
    std::string entity;
    double slack = 0;     // negative = amount of violation
};

struct Verdict {
    bool feasible = true;
    std::vector<Violation> violations;
};

Verdict check_feasibility(const Scenario& s, const Solution& sol, DelayMode mode);

std::string verdict_to_json(const Verdict& v);

// Normalized allocation score, 0..100. When max_cost == min_cost the score
// is 100 for any feasible allocation.
double reward(double option_cost, double min_cost, double max_cost, bool chi);

// 1 - (eta - eta*)/eta*; throws if eta beats the reference.
double accuracy(double eta, double eta_star);

std::string solution_to_json(const Solution& sol);
Solution solution_from_json(const std::string& text);

}  // namespace ccra
