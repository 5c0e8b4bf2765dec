#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <vector>

#include "treeminer/game.hpp"
#include "treeminer/tree.hpp"

namespace treeminer {

// Discrete tree-mining game. The player is the continuous potential player
// run on a shadow game that shares node ids with the discrete tree.
struct TmState {
    RootedTree tree;                 // unit edges; inactive nodes are kept
    std::vector<int> depth;          // by id, in edges from the root
    std::map<NodeId, int> miners;    // active leaves only
    double cost = 0.0;
    int max_depth = 0;
    GameState shadow;
    PotentialParams params;
    GameOptions shadow_options{false, true};
    bool verify = true;
    std::size_t steps = 0;
    // Steps where the shadow moved more than the chosen leaf's last miner.
    std::size_t rebalances = 0;
    // Steps after which the discrete cost exceeded the shadow cost.
    std::size_t cost_violations = 0;
    double worst_cost_gap = -std::numeric_limits<double>::infinity();
};

// Root 0 and one unit-length active leaf 1 holding all k miners.
TmState tm_init(int k);
TmState tm_init(int k, const PotentialParams& p);

struct Prop7Result {
    // Where the miner left on the chosen leaf goes.
    NodeId dest = kNoNode;
    // Further unit moves between other active leaves; empty unless the
    // shadow player had to rebalance.
    std::vector<UnitMove> shifts;
    double ctm_cost_delta = 0.0;
};

struct TmStepResult {
    NodeId chosen = kNoNode;
    int x = 0;
    std::vector<NodeId> children;
    NodeId dest = kNoNode;
    std::vector<UnitMove> shifts;
    double cost_delta = 0.0;
    double ctm_cost_delta = 0.0;
};

// Deactivates the chosen leaf, gives it x-1 unit children with one miner
// each, and sends the last miner where the shadow player puts it. The
// discrete configuration then equals the shadow one.
TmStepResult tm_step(TmState& state, NodeId chosen);

// Mirrors the discrete step on the shadow game and completes partial
// leaves. Expects the discrete children to exist already.
Prop7Result emulate_prop7(TmState& state, NodeId chosen, const std::vector<NodeId>& children);

// Throws InvariantViolation if the discrete and shadow games disagree.
void verify_correspondence(const TmState& state);

// Distance between two nodes of the discrete tree.
int tm_distance(const TmState& state, NodeId u, NodeId v);

// Smallest depth among active leaves.
int min_active_depth(const TmState& state);

// gamma * phi(k) * depth; 1200 k^2 D at default constants.
double mining_bound(const PotentialParams& p, int k, double depth);

} // namespace treeminer
