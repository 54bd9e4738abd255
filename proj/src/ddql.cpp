#include "ccra/ddql.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ccra {

namespace {

double draw_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double path_link_cost(const Scenario& s, int path_id) {
    double c = 0;
    for (int lid : s.path(path_id).links) c += s.link(lid).unit_cost;
    return c;
}

int argmax_lowest(const Eigen::VectorXd& v) {
    int best = 0;
    for (int i = 1; i < v.size(); ++i)
        if (v(i) > v(best)) best = i;
    return best;
}

}  // namespace

Eigen::VectorXd encode_state(const Scenario& s, const ResidualState& res) {
    const int V = static_cast<int>(s.nodes.size());
    const int L = static_cast<int>(s.links.size());
    const int K = s.priorities.level_count;
    Eigen::VectorXd theta(2 * V + 2 * L + K * L);
    int at = 0;
    for (int v = 0; v < V; ++v) theta(at++) = res.node_free[static_cast<std::size_t>(v)];
    for (int v = 0; v < V; ++v) theta(at++) = s.node(v).unit_cost;
    for (int l = 0; l < L; ++l) theta(at++) = res.link_free[static_cast<std::size_t>(l)];
    for (int l = 0; l < L; ++l) theta(at++) = s.link(l).unit_cost;
    // per-level delay bounds recomputed from committed (not nominal) load:
    // the bound a newly admitted flow would experience right now
    const double H = s.priorities.max_packet;
    for (int k = 0; k < K; ++k) {
        for (int l = 0; l < L; ++l) {
            const auto ls = static_cast<std::size_t>(l);
            double burst = H;
            double drained = 0;
            for (int q = 0; q <= k; ++q) {
                const auto qs = static_cast<std::size_t>(q);
                burst += s.priorities.queue_size[qs] - res.queue_free[ls][qs];
                if (q < k)
                    drained += s.priorities.bandwidth_share[ls][qs] - res.share_free[ls][qs];
            }
            const double bw = s.link(l).bandwidth;
            theta(at++) = burst / (bw - drained) + H / bw;
        }
    }
    return theta;
}

PrunedSets prune_action_sets(const Scenario& s, int service, int v_limit, int p_limit) {
    if (v_limit < 1 || p_limit < 1) throw std::invalid_argument("pruning limits must be >= 1");
    const auto& srv = s.service(service);
    const auto entries = s.entry_nodes();

    PrunedSets out;
    std::vector<int> feasible;
    for (const auto& n : s.nodes) {
        if (n.compute_capacity < srv.vnf_capacity) continue;
        bool reachable = false;
        for (int e : entries)
            if (!s.paths_between(e, n.id).empty() && !s.paths_between(n.id, e).empty())
                reachable = true;
        if (reachable) feasible.push_back(n.id);
    }
    std::sort(feasible.begin(), feasible.end(), [&s](int a, int b) {
        if (s.node(a).unit_cost != s.node(b).unit_cost)
            return s.node(a).unit_cost < s.node(b).unit_cost;
        return a < b;
    });
    if (static_cast<int>(feasible.size()) > v_limit) feasible.resize(static_cast<std::size_t>(v_limit));
    out.nodes = feasible;

    auto cheapest = [&s, p_limit](std::vector<int> ids) {
        std::sort(ids.begin(), ids.end(), [&s](int a, int b) {
            const double ca = path_link_cost(s, a), cb = path_link_cost(s, b);
            if (ca != cb) return ca < cb;
            return a < b;
        });
        if (static_cast<int>(ids.size()) > p_limit) ids.resize(static_cast<std::size_t>(p_limit));
        return ids;
    };
    for (int e : entries) {
        for (int v : out.nodes) {
            auto in = cheapest(s.paths_between(e, v));
            auto back = cheapest(s.paths_between(v, e));
            if (!in.empty()) out.inquiry[{e, v}] = std::move(in);
            if (!back.empty()) out.response[{e, v}] = std::move(back);
        }
    }
    return out;
}

Environment::Environment(Scenario s, int service, int v_limit, int p_limit)
    : scenario_(std::move(s)),
      service_(service),
      p_limit_(p_limit),
      pruned_(prune_action_sets(scenario_, service, v_limit, p_limit)),
      residual_(ResidualState::fresh(scenario_)),
      delay_bounds_(delay_bound_table(scenario_.priorities, scenario_.links)) {
    for (const auto& r : scenario_.requests)
        if (r.service == service_) request_ids_.push_back(r.id);

    for (const auto& n : scenario_.nodes) {
        node_cap_max_ = std::max(node_cap_max_, n.compute_capacity);
        node_cost_max_ = std::max(node_cost_max_, n.unit_cost);
    }
    for (const auto& l : scenario_.links) {
        bw_max_ = std::max(bw_max_, l.bandwidth);
        link_cost_max_ = std::max(link_cost_max_, l.unit_cost);
    }
    for (const auto& per_level : delay_bounds_)
        for (double d : per_level) delay_max_ = std::max(delay_max_, d);

    // static cost extremes over the pruned option set, per request
    for (int rid : request_ids_) {
        const auto& r = scenario_.request(rid);
        double lo = std::numeric_limits<double>::infinity(), hi = 0;
        for (int v : pruned_.nodes) {
            auto iti = pruned_.inquiry.find({r.entry_node, v});
            auto ito = pruned_.response.find({r.entry_node, v});
            if (iti == pruned_.inquiry.end() || ito == pruned_.response.end()) continue;
            for (int ip : iti->second)
                for (int rp : ito->second) {
                    const double c =
                        allocation_cost(scenario_, v, scenario_.path(ip), scenario_.path(rp));
                    lo = std::min(lo, c);
                    hi = std::max(hi, c);
                }
        }
        if (std::isfinite(lo)) bounds_[rid] = {lo, hi};
    }
}

int Environment::action_width(AgentRole role) const {
    switch (role) {
        case AgentRole::ServicePlacement:
            return static_cast<int>(pruned_.nodes.size());
        case AgentRole::PriorityAssignment:
            return scenario_.priorities.level_count;
        default:
            return p_limit_;
    }
}

int Environment::state_width() const {
    const int V = static_cast<int>(scenario_.nodes.size());
    const int L = static_cast<int>(scenario_.links.size());
    return 2 * V + 2 * L + scenario_.priorities.level_count * L;
}

Eigen::VectorXd Environment::state() const {
    Eigen::VectorXd theta = encode_state(scenario_, residual_);
    const int V = static_cast<int>(scenario_.nodes.size());
    const int L = static_cast<int>(scenario_.links.size());
    theta.segment(0, V) /= node_cap_max_;
    theta.segment(V, V) /= node_cost_max_;
    theta.segment(2 * V, L) /= bw_max_;
    theta.segment(2 * V + L, L) /= link_cost_max_;
    theta.segment(2 * V + 2 * L, theta.size() - 2 * V - 2 * L) /= delay_max_;
    return theta;
}

void Environment::reset() { residual_ = ResidualState::fresh(scenario_); }

Environment::StepResult Environment::apply(int request_id, const JointAction& action) {
    const auto& r = scenario_.request(request_id);
    if (r.service != service_) throw std::invalid_argument("request belongs to another service");
    if (action.node_slot < 0 || action.node_slot >= action_width(AgentRole::ServicePlacement) ||
        action.priority < 0 || action.priority >= scenario_.priorities.level_count ||
        action.inquiry_rank < 0 || action.inquiry_rank >= p_limit_ ||
        action.response_rank < 0 || action.response_rank >= p_limit_)
        throw std::invalid_argument("action index out of range");

    StepResult out;
    const int node = pruned_.nodes[static_cast<std::size_t>(action.node_slot)];

    auto resolve = [&](const std::map<std::pair<int, int>, std::vector<int>>& table,
                       int rank) {
        auto it = table.find({r.entry_node, node});
        if (it == table.end() || rank >= static_cast<int>(it->second.size())) return -1;
        return it->second[static_cast<std::size_t>(rank)];
    };
    const int ip = resolve(pruned_.inquiry, action.inquiry_rank);
    const int rp = resolve(pruned_.response, action.response_rank);

    bool chi = ip >= 0 && rp >= 0;
    Assignment a{node, action.priority, ip, rp};

    if (chi) {
        // linearized end-to-end delay against the request's requirement (C15)
        double delay = service_delay(r);
        for (int pid : {ip, rp})
            for (int lid : scenario_.path(pid).links)
                delay += delay_bounds_[static_cast<std::size_t>(action.priority)]
                                      [static_cast<std::size_t>(lid)];
        if (delay > r.delay_req + 1e-12) chi = false;
    }
    if (chi) chi = try_commit(scenario_, residual_, r, a).ok;

    out.chi = chi;
    if (chi) {
        out.assignment = a;
        auto it = bounds_.find(request_id);
        const double cost =
            allocation_cost(scenario_, node, scenario_.path(ip), scenario_.path(rp));
        out.reward = it == bounds_.end() ? 0.0
                                         : reward(cost, it->second.first, it->second.second, true);
    }
    out.next_state = state();
    return out;
}

bool Environment::reward_bounds(int request_id, double& min_cost, double& max_cost) const {
    auto it = bounds_.find(request_id);
    if (it == bounds_.end()) return false;
    min_cost = it->second.first;
    max_cost = it->second.second;
    return true;
}

void ReplayMemory::push(Transition t) {
    if (capacity_ == 0) return;
    if (ring_.size() < capacity_) {
        ring_.push_back(std::move(t));
    } else {
        ring_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
}

const Transition& ReplayMemory::sample(std::mt19937_64& rng) const {
    if (ring_.empty()) throw std::logic_error("sampling from empty memory");
    return ring_[static_cast<std::size_t>(rng() % ring_.size())];
}

std::uint64_t scenario_fingerprint(const Scenario& s) {
    const std::string text = scenario_to_json(s);
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

AgentChain AgentChain::make(const Environment& env, const TrainConfig& cfg,
                            std::mt19937_64& rng) {
    AgentChain chain;
    chain.service = env.service();
    chain.scenario_hash = scenario_fingerprint(env.scenario());
    const std::array<AgentRole, 4> roles{AgentRole::ServicePlacement,
                                         AgentRole::PriorityAssignment,
                                         AgentRole::InquiryPath, AgentRole::ResponsePath};
    for (std::size_t i = 0; i < roles.size(); ++i) {
        const int width = env.action_width(roles[i]);
        if (width < 1) throw std::runtime_error("empty action set: service unplaceable");
        std::vector<int> sizes{env.state_width()};
        sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
        sizes.push_back(width);
        chain.agents[i].eval = NeuralNet::make(sizes, rng);
        chain.agents[i].target = chain.agents[i].eval;
        chain.agents[i].opt = make_adam(chain.agents[i].eval, cfg.learning_rate);
    }
    return chain;
}

void AgentChain::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write chain file: " + path);
    out.write("CCRACHN1", 8);
    const auto srv = static_cast<std::uint32_t>(service);
    out.write(reinterpret_cast<const char*>(&srv), sizeof(srv));
    out.write(reinterpret_cast<const char*>(&scenario_hash), sizeof(scenario_hash));
    for (const auto& a : agents) a.eval.write(out);
    if (!out) throw std::runtime_error("failed writing chain file: " + path);
}

AgentChain AgentChain::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read chain file: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "CCRACHN1")
        throw std::runtime_error("not a chain file: " + path);
    AgentChain chain;
    std::uint32_t srv = 0;
    in.read(reinterpret_cast<char*>(&srv), sizeof(srv));
    in.read(reinterpret_cast<char*>(&chain.scenario_hash), sizeof(chain.scenario_hash));
    if (!in) throw std::runtime_error("truncated chain file: " + path);
    chain.service = static_cast<int>(srv);
    for (auto& a : chain.agents) {
        a.eval = NeuralNet::read(in);
        a.target = a.eval;
        a.opt = make_adam(a.eval, TrainConfig{}.learning_rate);
    }
    return chain;
}

double ddql_target(const Transition& t, const NeuralNet& q_eval, const NeuralNet& q_target,
                   double gamma) {
    if (t.terminal) return t.reward;
    const int pick = argmax_lowest(q_eval.forward(t.next_state));
    return t.reward + gamma * q_target.forward(t.next_state)(pick);
}

int select_action(const NeuralNet& net, const Eigen::VectorXd& state, double epsilon,
                  std::mt19937_64& rng) {
    const int width = net.output_width();
    if (width < 1) throw std::logic_error("empty action set");
    if (epsilon > 0 && draw_unit(rng) < epsilon)
        return static_cast<int>(rng() % static_cast<std::uint64_t>(width));
    return argmax_lowest(net.forward(state));
}

TrainResult train(Environment& env, AgentChain& chain, const TrainConfig& cfg,
                  std::mt19937_64& rng) {
    if (env.request_ids().empty()) throw std::runtime_error("no requests for this service");
    const double decrement =
        cfg.eps_auto ? (1.0 - cfg.eps_floor) / (0.8 * static_cast<double>(cfg.steps))
                     : cfg.eps_decrement;

    ReplayMemory memory(cfg.memory_capacity);
    TrainResult result;
    result.trace.reserve(static_cast<std::size_t>(cfg.steps));

    env.reset();
    std::size_t cursor = 0;
    std::deque<double> window;
    double window_sum = 0;

    for (long step = 1; step <= cfg.steps; ++step) {
        const double eps =
            std::max(cfg.eps_floor, 1.0 - static_cast<double>(step) * decrement);

        const int rid = env.request_ids()[cursor];
        Eigen::VectorXd theta = env.state();
        JointAction action;
        action.node_slot = select_action(chain.agents[0].eval, theta, eps, rng);
        action.priority = select_action(chain.agents[1].eval, theta, eps, rng);
        action.inquiry_rank = select_action(chain.agents[2].eval, theta, eps, rng);
        action.response_rank = select_action(chain.agents[3].eval, theta, eps, rng);

        auto outcome = env.apply(rid, action);
        const bool terminal = cursor + 1 == env.request_ids().size();

        Transition t;
        t.state = std::move(theta);
        t.next_state = std::move(outcome.next_state);
        t.actions = {action.node_slot, action.priority, action.inquiry_rank,
                     action.response_rank};
        t.reward = outcome.reward;
        t.terminal = terminal;
        memory.push(std::move(t));

        if (memory.size() >= static_cast<std::size_t>(cfg.batch_size)) {
            // one uniformly drawn batch shared by the whole chain
            std::vector<const Transition*> batch;
            batch.reserve(static_cast<std::size_t>(cfg.batch_size));
            for (int i = 0; i < cfg.batch_size; ++i) batch.push_back(&memory.sample(rng));

            const int B = cfg.batch_size;
            Eigen::MatrixXd states(env.state_width(), B), nexts(env.state_width(), B);
            for (int i = 0; i < B; ++i) {
                states.col(i) = batch[static_cast<std::size_t>(i)]->state;
                nexts.col(i) = batch[static_cast<std::size_t>(i)]->next_state;
            }
            for (std::size_t ag = 0; ag < chain.agents.size(); ++ag) {
                auto& agent = chain.agents[ag];
                const Eigen::MatrixXd q_next = agent.eval.forward_batch(nexts);
                const Eigen::MatrixXd q_next_t = agent.target.forward_batch(nexts);
                const Eigen::MatrixXd q_now = agent.eval.forward_batch(states);
                Eigen::MatrixXd out_grad =
                    Eigen::MatrixXd::Zero(q_now.rows(), q_now.cols());
                for (int i = 0; i < B; ++i) {
                    const auto* tr = batch[static_cast<std::size_t>(i)];
                    double y = tr->reward;
                    if (!tr->terminal) {
                        const int pick = argmax_lowest(q_next.col(i));
                        y += cfg.gamma * q_next_t(pick, i);
                    }
                    const int a = tr->actions[ag];
                    // d/dq of mean squared temporal difference, chosen output only
                    out_grad(a, i) = -2.0 * (y - q_now(a, i)) / B;
                }
                auto grads = backprop(agent.eval, states, out_grad);
                adam_update(agent.eval, grads, agent.opt);
            }
        }
        if (step % cfg.sync_period == 0)
            for (auto& agent : chain.agents) agent.target = agent.eval;

        window.push_back(outcome.reward);
        window_sum += outcome.reward;
        if (window.size() > 100) {
            window_sum -= window.front();
            window.pop_front();
        }
        result.trace.push_back(
            {step, eps, outcome.reward, window_sum / static_cast<double>(window.size())});

        cursor = (cursor + 1) % env.request_ids().size();
        if (cursor == 0) env.reset();  // episode done: restore all resources
    }
    return result;
}

std::string reward_trace_to_csv(const std::vector<TrainStep>& trace) {
    std::ostringstream out;
    out << "step,epsilon,beta,beta_ma100\n";
    out.setf(std::ios::fixed);
    out.precision(6);
    for (const auto& p : trace)
        out << p.step << "," << p.epsilon << "," << p.beta << "," << p.beta_ma100 << "\n";
    return out.str();
}

DecideResult decide(Environment& env, const AgentChain& chain, const TrainConfig& cfg,
                    double beta_bar_init) {
    DecideResult res;
    res.beta_bar = beta_bar_init;
    env.reset();
    std::mt19937_64 unused(0);  // greedy selection never consumes randomness
    for (int rid : env.request_ids()) {
        const Eigen::VectorXd theta = env.state();
        JointAction action;
        action.node_slot = select_action(chain.agents[0].eval, theta, 0.0, unused);
        action.priority = select_action(chain.agents[1].eval, theta, 0.0, unused);
        action.inquiry_rank = select_action(chain.agents[2].eval, theta, 0.0, unused);
        action.response_rank = select_action(chain.agents[3].eval, theta, 0.0, unused);
        auto outcome = env.apply(rid, action);
        if (outcome.chi) {
            res.solution.assignments[rid] = outcome.assignment;
            res.solution.vnf_at.insert({env.service(), outcome.assignment.node});
            res.supported.push_back(rid);
        } else {
            res.rejected.push_back(rid);
        }
        res.beta_bar = cfg.gamma * outcome.reward + (1.0 - cfg.gamma) * res.beta_bar;
        if (res.beta_bar < cfg.retrain_threshold) res.drift = true;
    }
    res.cost = objective(env.scenario(), res.solution);
    return res;
}

}  // namespace ccra
