#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ccra/allocation.hpp"
#include "ccra/model.hpp"
#include "ccra/nn.hpp"

namespace ccra {

// Raw resource-state vector: [node compute left] + [node costs] +
// [link bandwidth left] + [link costs] + [per-level link delay bounds
// recomputed from what is already committed]. Length 2V + 2L + K*L.
Eigen::VectorXd encode_state(const Scenario& s, const ResidualState& res);

// Fixed-size action sets: the cheapest nodes that can host the service and
// are reachable from an entry in both directions, and per (entry, node) the
// cheapest few paths in each direction.
struct PrunedSets {
    std::vector<int> nodes;                                     // ordered by (cost, id)
    std::map<std::pair<int, int>, std::vector<int>> inquiry;    // (entry, node) -> paths
    std::map<std::pair<int, int>, std::vector<int>> response;
};

PrunedSets prune_action_sets(const Scenario& s, int service, int v_limit, int p_limit);

enum class AgentRole { ServicePlacement = 0, PriorityAssignment, InquiryPath, ResponsePath };

// Joint action: node slot into the pruned node list, priority level, and the
// per-direction path ranks resolved against (entry, chosen node).
struct JointAction {
    int node_slot = -1;
    int priority = -1;
    int inquiry_rank = -1;
    int response_rank = -1;
};

struct TrainConfig {
    long steps = 10000;
    double learning_rate = 1e-4;
    std::size_t memory_capacity = 50000;
    int batch_size = 32;
    double gamma = 0.99;
    double eps_decrement = 5e-6;   // per-step linear decay
    bool eps_auto = false;         // override: reach the floor at 0.8 * steps
    double eps_floor = 0.05;
    int sync_period = 200;
    double retrain_threshold = 40.0;  // drift flag when the reward EMA dips below
    int v_limit = 4;
    int p_limit = 2;
    std::vector<int> hidden = {128, 128};
};

// Stateful adapter around one service's share of a scenario: tracks residual
// capacities, serves one episode of its requests at a time, and converts
// joint actions into commit-or-reject outcomes with normalized rewards.
class Environment {
  public:
    Environment(Scenario s, int service, int v_limit, int p_limit);

    const Scenario& scenario() const { return scenario_; }
    int service() const { return service_; }
    const PrunedSets& pruned() const { return pruned_; }
    const ResidualState& residual() const { return residual_; }
    const std::vector<int>& request_ids() const { return request_ids_; }

    int action_width(AgentRole role) const;
    int state_width() const;

    // normalized state vector fed to the nets (each block scaled into [0,1]
    // by its scenario-nominal maximum)
    Eigen::VectorXd state() const;

    void reset();  // fresh residual, next episode starts at the first request

    struct StepResult {
        Eigen::VectorXd next_state;
        bool chi = false;
        double reward = 0;
        Assignment assignment;  // valid when chi
    };
    StepResult apply(int request_id, const JointAction& action);

    // static cost extremes of request r's options within the pruned sets;
    // returns false when no structurally valid option exists
    bool reward_bounds(int request_id, double& min_cost, double& max_cost) const;

  private:
    Scenario scenario_;
    int service_;
    int p_limit_;
    PrunedSets pruned_;
    ResidualState residual_;
    std::vector<int> request_ids_;
    std::vector<std::vector<double>> delay_bounds_;  // [level][link]
    // normalization constants
    double node_cap_max_ = 1, node_cost_max_ = 1, bw_max_ = 1, link_cost_max_ = 1,
           delay_max_ = 1;
    std::map<int, std::pair<double, double>> bounds_;  // request -> (min, max) cost
};

struct Transition {
    Eigen::VectorXd state, next_state;
    std::array<int, 4> actions{};
    double reward = 0;
    bool terminal = false;
};

class ReplayMemory {
  public:
    explicit ReplayMemory(std::size_t capacity) : capacity_(capacity) {}
    std::size_t size() const { return ring_.size(); }
    std::size_t capacity() const { return capacity_; }
    void push(Transition t);
    const Transition& sample(std::mt19937_64& rng) const;

  private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> ring_;
};

struct Agent {
    NeuralNet eval;
    NeuralNet target;
    AdamState opt;
};

struct AgentChain {
    std::array<Agent, 4> agents;  // SP, PA, QPS, PPS
    int service = -1;
    std::uint64_t scenario_hash = 0;

    static AgentChain make(const Environment& env, const TrainConfig& cfg,
                           std::mt19937_64& rng);
    void save(const std::string& path) const;
    static AgentChain load(const std::string& path);
};

std::uint64_t scenario_fingerprint(const Scenario& s);

// Decoupled target: reward + gamma * Q_target(next, argmax_a Q_eval(next, a));
// just the reward for terminal transitions.
double ddql_target(const Transition& t, const NeuralNet& q_eval, const NeuralNet& q_target,
                   double gamma);

// epsilon-greedy over the net's outputs; greedy ties break to the lowest index.
int select_action(const NeuralNet& net, const Eigen::VectorXd& state, double epsilon,
                  std::mt19937_64& rng);

struct TrainStep {
    long step = 0;
    double epsilon = 0;
    double beta = 0;
    double beta_ma100 = 0;  // moving average over the last 100 steps
};

struct TrainResult {
    std::vector<TrainStep> trace;
};

TrainResult train(Environment& env, AgentChain& chain, const TrainConfig& cfg,
                  std::mt19937_64& rng);

std::string reward_trace_to_csv(const std::vector<TrainStep>& trace);

struct DecideResult {
    Solution solution;
    std::vector<int> supported;
    std::vector<int> rejected;
    double cost = 0;
    double beta_bar = 100.0;
    bool drift = false;
};

// Greedy pass over the environment's requests in ascending id; updates the
// reward EMA and raises the drift flag when it crosses the retrain threshold.
DecideResult decide(Environment& env, const AgentChain& chain, const TrainConfig& cfg,
                    double beta_bar_init = 100.0);

}  // namespace ccra
