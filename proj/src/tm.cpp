#include "treeminer/tm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace treeminer {

namespace {

constexpr double kShapeTolerance = 1e-6;

int depth_of(const TmState& s, NodeId u) { return s.depth[static_cast<std::size_t>(u)]; }

// Length of the shadow edge above u, measured in the discrete tree.
double discrete_length(const TmState& s, NodeId u) {
    return depth_of(s, u) - depth_of(s, s.shadow.tree.parent(u));
}

NodeId add_discrete_child(TmState& s, NodeId parent) {
    NodeId c = s.tree.add_child(parent, 1.0);
    if (s.depth.size() <= static_cast<std::size_t>(c)) s.depth.resize(static_cast<std::size_t>(c) + 1, 0);
    s.depth[static_cast<std::size_t>(c)] = depth_of(s, parent) + 1;
    s.max_depth = std::max(s.max_depth, depth_of(s, c));
    return c;
}

// Elongates incomplete shadow leaves holding two or more miners until
// every such leaf has reached its discrete length.
void complete_leaves(TmState& s) {
    const std::size_t guard = 64 * (s.shadow.config.weights.size() + 4) * static_cast<std::size_t>(s.shadow.config.total() + 1);
    for (std::size_t round = 0;; ++round) {
        if (round > guard) throw InvariantViolation("shadow completion loop did not terminate");
        NodeId pick = kNoNode;
        double gap = 0.0;
        for (const auto& [leaf, x] : s.shadow.config.weights) {
            if (x < 2) continue;
            double g = discrete_length(s, leaf) - s.shadow.tree.edge_length(leaf);
            if (g > kLengthTolerance) {
                pick = leaf;
                gap = g;
                break;
            }
        }
        if (pick == kNoNode) break;
        ctm_apply(s.shadow, CtmMove::elongate(pick, gap), s.params, s.shadow_options);
        double dd = discrete_length(s, pick);
        if (std::abs(dd - s.shadow.tree.edge_length(pick)) <= kShapeTolerance) s.shadow.tree.set_edge_length(pick, dd);
    }
}

} // namespace

double mining_bound(const PotentialParams& p, int k, double depth) { return p.gamma * p.phi(k) * depth; }

TmState tm_init(int k) { return tm_init(k, PotentialParams::defaults(k)); }

TmState tm_init(int k, const PotentialParams& p) {
    if (k < 2) throw InputError("the tree-mining game needs k >= 2");
    p.validate(k);
    TmState s;
    s.params = p;
    s.depth = {0};
    NodeId leaf = add_discrete_child(s, 0);
    s.miners[leaf] = k;
    s.shadow = initial_game(k, 1.0);
    if (!s.shadow.config.weights.count(leaf)) throw InvariantViolation("shadow and discrete ids diverged");
    return s;
}

int tm_distance(const TmState& s, NodeId u, NodeId v) {
    int d = 0;
    while (depth_of(s, u) > depth_of(s, v)) { u = s.tree.parent(u); ++d; }
    while (depth_of(s, v) > depth_of(s, u)) { v = s.tree.parent(v); ++d; }
    while (u != v) {
        u = s.tree.parent(u);
        v = s.tree.parent(v);
        d += 2;
    }
    return d;
}

int min_active_depth(const TmState& s) {
    int d = std::numeric_limits<int>::max();
    for (const auto& [leaf, x] : s.miners) {
        (void)x;
        d = std::min(d, depth_of(s, leaf));
    }
    return d;
}

Prop7Result emulate_prop7(TmState& s, NodeId chosen, const std::vector<NodeId>& children) {
    const int x = s.miners.at(chosen);
    const double before = s.shadow.cost;
    if (x == 1) {
        ctm_apply(s.shadow, CtmMove::remove(chosen), s.params, s.shadow_options);
    } else if (x == 2) {
        // One child: in the simplified view the leaf just gets longer.
        NodeId c = children.at(0);
        s.shadow.tree.relabel(chosen, c);
        s.shadow.config.weights.erase(chosen);
        s.shadow.config.weights[c] = 2;
    } else {
        CtmMove mv = CtmMove::fork(chosen, x - 1);
        mv.child_ids = children;
        ctm_apply(s.shadow, mv, s.params, s.shadow_options);
    }
    complete_leaves(s);

    // Usually the shadow config exceeds "one miner per new child" by one unit
    // at a single leaf. Any other difference is matched optimally on the
    // discrete tree.
    std::map<NodeId, double> placed, wanted;
    for (const auto& [leaf, xc] : s.miners)
        if (leaf != chosen) placed[leaf] = xc;
    for (NodeId c : children) placed[c] = 1;
    placed[chosen] += 1;
    for (const auto& [leaf, xc] : s.shadow.config.weights) wanted[leaf] = xc;
    for (const auto& [leaf, xc] : s.shadow.config.weights)
        if (!s.tree.contains(leaf)) throw InvariantViolation("shadow leaf " + std::to_string(leaf) + " is not discrete");
    Prop7Result r;
    for (const MassMove& mv : ot_plan_nodes(s.tree, placed, wanted)) {
        long units = std::lround(mv.mass);
        if (std::abs(mv.mass - static_cast<double>(units)) > 1e-9)
            throw InvariantViolation("shadow and discrete placements differ by a fraction");
        for (long u = 0; u < units; ++u) {
            if (mv.src == chosen && r.dest == kNoNode) r.dest = mv.dst;
            else r.shifts.push_back({mv.src, mv.dst});
        }
    }
    if (r.dest == kNoNode) throw InvariantViolation("shadow placed no miner for the chosen leaf");
    r.ctm_cost_delta = s.shadow.cost - before;
    return r;
}

TmStepResult tm_step(TmState& s, NodeId chosen) {
    auto it = s.miners.find(chosen);
    if (it == s.miners.end()) throw RuleViolation("node " + std::to_string(chosen) + " is not an active leaf");
    TmStepResult r;
    r.chosen = chosen;
    r.x = it->second;
    for (int i = 0; i + 1 < r.x; ++i) r.children.push_back(add_discrete_child(s, chosen));
    Prop7Result e = emulate_prop7(s, chosen, r.children);
    r.dest = e.dest;
    r.ctm_cost_delta = e.ctm_cost_delta;
    r.shifts = e.shifts;
    const bool to_child = std::find(r.children.begin(), r.children.end(), r.dest) != r.children.end();
    r.cost_delta = to_child ? 0.0 : tm_distance(s, chosen, r.dest);
    for (const UnitMove& mv : r.shifts) r.cost_delta += tm_distance(s, mv.src, mv.dst);
    if (!r.shifts.empty()) ++s.rebalances;
    s.miners = s.shadow.config.weights;
    s.cost += r.cost_delta;
    ++s.steps;
    double gap = s.cost - s.shadow.cost;
    s.worst_cost_gap = std::max(s.worst_cost_gap, gap);
    if (gap > 1e-9 * (1.0 + s.shadow.cost)) ++s.cost_violations;
    if (s.verify) verify_correspondence(s);
    return r;
}

void verify_correspondence(const TmState& s) {
    auto fail = [](const std::string& what) { throw InvariantViolation("correspondence: " + what); };
    const RootedTree& sh = s.shadow.tree;
    if (sh.root() != s.tree.root()) fail("roots differ");
    std::vector<NodeId> leaves = sh.leaves();
    if (leaves.size() != s.miners.size()) fail("leaf sets differ");
    for (NodeId leaf : leaves) {
        auto it = s.miners.find(leaf);
        if (it == s.miners.end()) fail("shadow leaf " + std::to_string(leaf) + " is not active");
        if (it->second != s.shadow.config.at(leaf)) fail("miner counts differ at " + std::to_string(leaf));
    }
    for (NodeId u : sh.nodes()) {
        if (u == sh.root()) continue;
        if (!s.tree.contains(u) || !s.tree.is_ancestor(sh.parent(u), u))
            fail("shadow edge above " + std::to_string(u) + " is not a discrete path");
        double dd = discrete_length(s, u);
        double dc = sh.edge_length(u);
        if (dc > dd + kShapeTolerance) fail("shadow edge above " + std::to_string(u) + " is too long");
        if (!sh.children(u).empty()) {
            if (std::abs(dc - dd) > kShapeTolerance) fail("internal edge above " + std::to_string(u) + " differs");
        } else if (dc < dd - kShapeTolerance && s.shadow.config.at(u) != 1) {
            fail("partial leaf " + std::to_string(u) + " holds more than one miner");
        }
    }
}

} // namespace treeminer
