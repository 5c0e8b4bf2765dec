#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "treeminer/tm.hpp"
#include "treeminer/tree.hpp"

namespace treeminer {

enum class Scheduler { RoundRobin, Random, Lopsided };
Scheduler parse_scheduler(const std::string& name);
const char* to_string(Scheduler s);

// Picks which robot moves next.
class RobotScheduler {
public:
    RobotScheduler(Scheduler kind, int k, std::uint64_t seed);
    int next();

private:
    Scheduler kind_;
    int k_;
    int cursor_ = 0;
    std::mt19937_64 rng_;
    std::discrete_distribution<int> lopsided_;
};

enum class StepKind { Fresh, Toward, Probe };

struct ActeMove {
    int robot;
    NodeId from;
    NodeId to;
    StepKind kind;
};

// Locally-greedy exploration with targets given by the tree-mining player.
// Node ids of the hidden tree index every per-node array.
class Explorer {
public:
    Explorer(const RootedTree& hidden, int k, const PotentialParams& p, bool verify_tm = true);

    // Children revealed after layer `reveal[c]`; moves only use children with
    // reveal <= horizon. Defaults reveal everything.
    void set_reveal(std::vector<int> reveal);
    void set_horizon(int horizon) { horizon_ = horizon; }

    // Grants one move to a robot. Returns false once exploration is over.
    bool step(int robot);
    bool finished() const { return finished_; }

    int k() const { return k_; }
    NodeId position(int robot) const { return pos_[static_cast<std::size_t>(robot)]; }
    NodeId target_node(int robot) const;
    const TmState& tm() const { return tm_; }
    const RootedTree& hidden() const { return tree_; }
    std::size_t mined_count() const { return mined_count_; }
    bool is_mined(NodeId u) const { return mined_[static_cast<std::size_t>(u)]; }

    long long moves = 0;
    long long fresh_moves = 0;
    long long toward_moves = 0;
    long long probe_moves = 0;
    // Sum of distances from old to new target over all retargetings.
    double retarget_distance = 0.0;

    std::function<void(const ActeMove&)> on_move;

private:
    NodeId fresh_child(NodeId u);
    bool has_hidden_children(NodeId u) const;
    void mark_mined(NodeId u);
    void cascade();
    NodeId live_child(NodeId u);
    NodeId nearest_unmined(NodeId u);
    void fire(NodeId leaf);
    NodeId child_toward(NodeId u, NodeId target) const;
    bool inside(NodeId anc, NodeId u) const;
    int real_distance(NodeId u, NodeId v) const;
    void record(int robot, NodeId from, NodeId to, StepKind kind);

    RootedTree tree_;
    int k_;
    std::size_t n_;
    std::vector<int> depth_, tin_, tout_, unmined_below_, reveal_;
    std::vector<char> visited_, mined_;
    std::vector<std::size_t> next_fresh_, next_work_;
    std::vector<NodeId> pos_, target_;
    std::vector<NodeId> tm_real_;
    std::vector<std::vector<NodeId>> tm_at_real_;
    std::set<NodeId> pending_;
    TmState tm_;
    int horizon_ = std::numeric_limits<int>::max();
    std::size_t mined_count_ = 0;
    bool finished_ = false;
};

struct ActeOptions {
    Scheduler scheduler = Scheduler::RoundRobin;
    std::uint64_t seed = 0;
    bool verify_tm = true;
    // Throw BoundViolation / InvariantViolation when a bound fails.
    bool enforce = true;
    std::function<void(const ActeMove&)> on_move;
};

struct ActeReport {
    std::size_t n = 0;
    int depth = 0;
    int k = 0;
    long long moves = 0;
    long long fresh_moves = 0;
    long long toward_moves = 0;
    long long probe_moves = 0;
    double retarget_distance = 0.0;
    double tm_cost = 0.0;
    double ctm_cost = 0.0;
    std::size_t tm_steps = 0;
    int tm_depth = 0;
    std::size_t tm_cost_violations = 0;
    std::size_t tm_rebalances = 0;
    double bound = 0.0;         // 2n + 1200 k^2 D
    bool within_bound = true;
    bool within_ledger = true;  // moves <= 2n + retarget distance
};

// 2n + gamma phi(k) D.
double acte_bound(std::size_t n, int k, int depth);

ActeReport run_acte(const RootedTree& tree, int k, const ActeOptions& opts = {});

} // namespace treeminer
